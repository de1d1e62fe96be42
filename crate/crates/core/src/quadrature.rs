//! Quadrature rules: symmetric Gauss rules on triangles and adaptive
//! Gauss–Kronrod integration on intervals.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

/// A barycentric quadrature point `(λ₁, λ₂, λ₃, w)` with weights summing to 1.
pub type BaryPoint = (f64, f64, f64, f64);

const RULE_1: [BaryPoint; 1] = [(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0)];

const RULE_3: [BaryPoint; 3] = [
    (2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0),
    (1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0),
    (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0),
];

// Dunavant degree 4
const A6: f64 = 0.445_948_490_915_965;
const B6: f64 = 0.108_103_018_168_070;
const W6A: f64 = 0.223_381_589_678_011;
const C6: f64 = 0.091_576_213_509_771;
const D6: f64 = 0.816_847_572_980_459;
const W6C: f64 = 0.109_951_743_655_322;
const RULE_6: [BaryPoint; 6] = [
    (B6, A6, A6, W6A),
    (A6, B6, A6, W6A),
    (A6, A6, B6, W6A),
    (D6, C6, C6, W6C),
    (C6, D6, C6, W6C),
    (C6, C6, D6, W6C),
];

// Dunavant degree 6
const A12: f64 = 0.249_286_745_170_910;
const B12: f64 = 0.501_426_509_658_179;
const W12A: f64 = 0.116_786_275_726_379;
const C12: f64 = 0.063_089_014_491_502;
const D12: f64 = 0.873_821_971_016_996;
const W12C: f64 = 0.050_844_906_370_207;
const E12: f64 = 0.310_352_451_033_784;
const F12: f64 = 0.636_502_499_121_399;
const G12: f64 = 0.053_145_049_844_817;
const W12E: f64 = 0.082_851_075_618_374;
const RULE_12: [BaryPoint; 12] = [
    (B12, A12, A12, W12A),
    (A12, B12, A12, W12A),
    (A12, A12, B12, W12A),
    (D12, C12, C12, W12C),
    (C12, D12, C12, W12C),
    (C12, C12, D12, W12C),
    (E12, F12, G12, W12E),
    (F12, E12, G12, W12E),
    (G12, E12, F12, W12E),
    (E12, G12, F12, W12E),
    (F12, G12, E12, W12E),
    (G12, F12, E12, W12E),
];

/// Symmetric triangle rule with the given number of points (1, 3, 6 or 12).
pub fn triangle_rule(points: usize) -> Result<&'static [BaryPoint]> {
    match points {
        1 => Ok(&RULE_1),
        3 => Ok(&RULE_3),
        6 => Ok(&RULE_6),
        12 => Ok(&RULE_12),
        _ => Err(domain(
            "triangle quadrature order must be one of 1, 3, 6, 12",
        )),
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: `(integral, error estimate)`.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`
/// to absolute tolerance `tol`.
pub fn integrate_adaptive(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_PANELS: usize = 4000;
    let (v, e) = gk15(&mut f, a, b);
    let mut panels: Vec<(f64, f64, f64, f64)> = alloc::vec![(a, b, v, e)];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(panels.iter().map(|p| p.2).sum());
        }
        if panels.len() >= MAX_PANELS || !total_err.is_finite() {
            return Err(Error::Quadrature {
                residual: total_err,
            });
        }
        let (idx, _) =
            panels.iter().enumerate().fold(
                (0, -1.0),
                |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc },
            );
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}
