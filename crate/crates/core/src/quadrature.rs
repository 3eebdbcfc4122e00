//! Adaptive Gauss-Kronrod (7/15 point) quadrature, plus nested integration
//! over ordered chains `L_1 <= v_1 <= v_2 <= ... <= v_m <= upper`.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;

fn kronrod<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(centre - dx)? + f(centre + dx)?;
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Ok((kron * half, ((kron - gauss) * half).abs()))
}

fn adapt<F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (value, err) = kronrod(f, a, b)?;
    if err <= tol || (b - a).abs() < f64::EPSILON * a.abs().max(b.abs()).max(1.0) * 16.0 {
        return Ok(value);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a}, {b}] (error estimate {err:e}, tolerance {tol:e})"
        )));
    }
    let mid = 0.5 * (a + b);
    let half_tol = tol * std::f64::consts::FRAC_1_SQRT_2;
    Ok(adapt(f, a, mid, half_tol, depth + 1)? + adapt(f, mid, b, half_tol, depth + 1)?)
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return Ok(-integrate(f, b, a, tol)?);
    }
    adapt(&f, a, b, tol, 0)
}

/// `int_{L_m}^{upper} int_{L_{m-1}}^{v_m} ... int_{L_1}^{v_2} f(v_1) dv_1 ... dv_m`
/// where `lowers = [L_1, ..., L_m]` (innermost first).
pub fn chain_integral<F>(lowers: &[f64], integrand: &F, upper: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    match lowers.split_last() {
        None => Err(Error::InvalidParams("empty chain".into())),
        Some((&lo, [])) => integrate(|v| Ok(integrand(v)), lo, upper, tol),
        Some((&lo, inner)) => integrate(|v| chain_integral(inner, integrand, v, tol), lo, upper, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_smooth_functions() {
        let v = integrate(|x| Ok(x.powi(5)), 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 64.0 / 6.0).abs() < 1e-12);
        let v = integrate(|x| Ok(x.sin()), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(|x| Ok(x.sqrt()), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
        assert_eq!(integrate(Ok, 1.0, 1.0, 1e-9).unwrap(), 0.0);
        let v = integrate(Ok, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
    }

    #[test]
    fn simplex_volume() {
        // 0 <= v1 <= v2 <= v3 <= 1 has volume 1/6
        let v = chain_integral(&[0.0, 0.0, 0.0], &|_| 1.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn singular_integrand_fails() {
        let r = integrate(|x| Ok(1.0 / x), 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }
}
