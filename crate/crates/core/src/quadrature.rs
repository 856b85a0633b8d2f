//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval is first cut at the supplied breakpoints; afterwards the
//! subinterval with the largest `|K15 - G7|` is bisected until the summed
//! estimate falls below the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::coeff::Expr;
use crate::error::{EvalError, QuadratureError};

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

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const MAX_INTERVALS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &F, lo: f64, hi: f64) -> Result<Segment, EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        abs: abs * half.abs(),
    })
}

/// Integrates `f` over `[lo, hi]`, cutting first at `breaks`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, breaks: &[f64], tol: f64) -> Result<Integral, QuadratureError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(QuadratureError::InvalidInterval { lo, hi });
    }
    if !(tol > 0.0) {
        return Err(QuadratureError::InvalidTolerance(tol));
    }
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    inner.sort_by(|a, b| a.total_cmp(b));
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut finished = 0usize;
    let (mut total_err, mut total_abs) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let seg = gauss_kronrod(&f, w[0], w[1])?;
        total_err += seg.error;
        total_abs += seg.abs;
        heap.push(seg);
    }
    let mut frozen = Vec::new();
    let width_floor = 64.0 * f64::EPSILON * (lo.abs().max(hi.abs()));
    loop {
        let intervals = heap.len() + finished;
        let done = total_err <= tol || total_err <= 50.0 * f64::EPSILON * total_abs;
        if done || heap.is_empty() || intervals >= MAX_INTERVALS {
            let value: f64 = heap.iter().chain(frozen.iter()).map(|s: &Segment| s.value).sum();
            // re-sum to shed drift from the running updates
            let error: f64 = heap.iter().chain(frozen.iter()).map(|s: &Segment| s.error).sum();
            if done {
                return Ok(Integral { value, error, intervals });
            }
            return Err(QuadratureError::NoConvergence { value, error, intervals });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.lo + worst.hi);
        if worst.hi - worst.lo <= width_floor.max(f64::MIN_POSITIVE) || mid <= worst.lo || mid >= worst.hi {
            finished += 1;
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod(&f, worst.lo, mid)?;
        let right = gauss_kronrod(&f, mid, worst.hi)?;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
    }
}

/// Integrates an expression, splitting at its own breakpoints.
pub fn integrate_adaptive(f: &Expr, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64), QuadratureError> {
    let breaks = f.breakpoints_in(lo, hi);
    let out = integrate(|x| f.eval(x), lo, hi, &breaks, tol)?;
    Ok((out.value, out.error))
}
