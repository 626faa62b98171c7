"""Published threshold tables: (beta, alpha, nu, gamma[, x~]) per column.

Values are transcribed verbatim; ``table_id`` names follow the CLI
(``sec-q05`` = sectional, q = 0.5, ...).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TableRow:
    beta: float
    alpha: float
    nu: float
    gamma: float
    x_mag: float | None = None


@dataclass(frozen=True)
class ReferenceTable:
    table_id: str
    kind: str
    q: float
    caption: str
    rows: tuple[TableRow, ...]

    @property
    def tolerance(self) -> float:
        return 0.015 if self.kind == "weak" else 0.01


def _rows(betas, alphas, nus, gammas, xs=None):
    xs = xs or [None] * len(betas)
    return tuple(TableRow(*vals) for vals in zip(betas, alphas, nus, gammas, xs))


TABLES: dict[str, ReferenceTable] = {
    t.table_id: t
    for t in (
        ReferenceTable("sec-q05", "sectional", 0.5, "Sectional threshold bounds lq, q=0.5", _rows(
            [0.0050, 0.0200, 0.0400, 0.0600, 0.0900, 0.1200, 0.1500, 0.2000, 0.2500, 0.3200, 0.4500],
            [0.0405, 0.1299, 0.2262, 0.3091, 0.4173, 0.5112, 0.5938, 0.7105, 0.8051, 0.9046, 0.9974],
            [5.8112, 3.2935, 2.3730, 1.9152, 1.5033, 1.2328, 1.0329, 0.7910, 0.6021, 0.3906, 0.0866],
            [0.1005, 0.1800, 0.2372, 0.2775, 0.3222, 0.3565, 0.3841, 0.4199, 0.4475, 0.4740, 0.4977])),
        ReferenceTable("sec-q03", "sectional", 0.3, "Sectional threshold bounds lq, q=0.3", _rows(
            [0.0050, 0.0100, 0.0300, 0.0500, 0.0800, 0.1100, 0.1500, 0.1900, 0.2400, 0.3100, 0.4500],
            [0.0436, 0.0780, 0.1900, 0.2821, 0.3992, 0.4991, 0.6124, 0.7073, 0.8042, 0.9047, 0.9992],
            [9.2019, 6.4961, 3.5738, 2.6101, 1.8927, 1.4778, 1.1231, 0.8727, 0.6335, 0.3965, 0.0667],
            [0.1039, 0.1398, 0.2174, 0.2649, 0.3152, 0.3520, 0.3900, 0.4192, 0.4471, 0.4741, 0.4983])),
        ReferenceTable("sec-q01", "sectional", 0.1, "Sectional threshold bounds lq, q=0.1", _rows(
            [0.0010, 0.0100, 0.0300, 0.0500, 0.0700, 0.1000, 0.1300, 0.1700, 0.2200, 0.2900, 0.4400],
            [0.0139, 0.0873, 0.2089, 0.3069, 0.3912, 0.4998, 0.5921, 0.6953, 0.7983, 0.9023, 0.9997],
            [26.050, 9.2658, 4.5185, 3.1043, 2.3942, 1.7389, 1.3434, 0.9913, 0.6908, 0.4044, 0.0514],
            [0.0781, 0.1473, 0.2282, 0.2764, 0.3119, 0.3528, 0.3830, 0.4153, 0.4453, 0.4734, 0.4983])),
        ReferenceTable("str-q05", "strong", 0.5, "Strong threshold bounds lq, q=0.5", _rows(
            [0.0005, 0.0050, 0.0150, 0.0250, 0.0400, 0.0550, 0.0750, 0.1000, 0.1400, 0.1800, 0.3200],
            [0.0138, 0.0919, 0.2114, 0.3081, 0.4142, 0.5053, 0.6030, 0.7006, 0.8156, 0.8944, 0.9998],
            [9.2604, 3.8721, 2.5000, 2.1680, 1.4450, 1.2500, 0.9423, 0.7368, 0.5141, 0.3577, 0.0286],
            [0.0587, 0.1563, 0.2267, 0.2612, 0.3217, 0.3499, 0.3881, 0.4183, 0.4514, 0.4727, 0.4996])),
        ReferenceTable("str-q03", "strong", 0.3, "Strong threshold bounds lq, q=0.3", _rows(
            [0.0005, 0.0050, 0.0150, 0.0250, 0.0400, 0.0600, 0.0800, 0.1000, 0.1400, 0.2000, 0.3600],
            [0.0132, 0.0879, 0.2020, 0.2918, 0.3968, 0.5100, 0.6007, 0.6752, 0.7888, 0.8995, 0.9999],
            [17.763, 5.6990, 3.2832, 2.6563, 1.7745, 1.3136, 1.0333, 0.8362, 0.5737, 0.3330, 0.0259],
            [0.0568, 0.1563, 0.2245, 0.2582, 0.3147, 0.3567, 0.3872, 0.4104, 0.4436, 0.4737, 0.4994])),
        ReferenceTable("str-q01", "strong", 0.1, "Strong threshold bounds lq, q=0.1", _rows(
            [0.0005, 0.0050, 0.0150, 0.0250, 0.0400, 0.0600, 0.0850, 0.1200, 0.1600, 0.2200, 0.4000],
            [0.0128, 0.0858, 0.1966, 0.2843, 0.3862, 0.4963, 0.6045, 0.7187, 0.8132, 0.9070, 0.9991],
            [34.531, 8.5931, 4.5230, 3.5547, 2.1967, 1.5735, 1.1320, 0.7736, 0.5276, 0.3035, 0.0223],
            [0.0562, 0.1563, 0.2215, 0.2518, 0.3125, 0.3519, 0.3883, 0.4234, 0.4504, 0.4756, 0.4993])),
        ReferenceTable("weak-q05", "weak", 0.5, "Weak threshold bounds lq, q=0.5", _rows(
            [0.0050, 0.0200, 0.0600, 0.1100, 0.1600, 0.2400, 0.3200, 0.4000, 0.5200, 0.6400, 0.9200],
            [0.0274, 0.0851, 0.1981, 0.3071, 0.3995, 0.5212, 0.6257, 0.7117, 0.8185, 0.9006, 0.9990],
            [6.7123, 3.8539, 2.4321, 1.7927, 1.4733, 1.1500, 0.9033, 0.7319, 0.5583, 0.3900, 0.0442],
            [0.0830, 0.1505, 0.2212, 0.2812, 0.3178, 0.3470, 0.3931, 0.4206, 0.4535, 0.4777, 0.5018],
            [7.4176, 4.5521, 2.5595, 2.0168, 1.7742, 1.3513, 1.2865, 1.2250, 1.2925, 1.3074, 1.6199])),
        ReferenceTable("weak-q03", "weak", 0.3, "Weak threshold bounds lq, q=0.3", _rows(
            [0.0010, 0.0200, 0.0500, 0.0900, 0.1400, 0.2000, 0.2800, 0.3600, 0.4400, 0.6000, 0.9200],
            [0.0081, 0.0958, 0.1913, 0.2914, 0.3985, 0.5054, 0.6188, 0.7110, 0.7889, 0.8993, 0.9991],
            [22.565, 5.4895, 3.3171, 2.3060, 1.7590, 1.3475, 0.9736, 0.7632, 0.5694, 0.3784, 0.0368],
            [0.0442, 0.1519, 0.2213, 0.2785, 0.3080, 0.3436, 0.3885, 0.4258, 0.4436, 0.4737, 0.5006],
            [9.7741, 2.9006, 1.6855, 1.5349, 0.8705, 0.8734, 0.8656, 0.9196, 0.8888, 0.9157, 1.4012])),
    )
}
