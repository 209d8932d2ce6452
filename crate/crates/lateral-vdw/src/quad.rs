//! Adaptive Gauss-Kronrod panel integration for small fixed-size vector
//! integrands. Internal machinery behind the profile quadratures.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights; QUADPACK values.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_98,
    0.417_959_183_673_469_387_755_102_040_816_33,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| self.a.total_cmp(&other.a))
    }
}

/// One 15-point Kronrod evaluation; returns the panel value per component
/// and the max-component |K15 - G7| error estimate.
fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<([f64; N], f64)>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center)?;
    let mut resk = [0.0; N];
    let mut resg = [0.0; N];
    for i in 0..N {
        resk[i] = WGK[7] * fc[i];
        resg[i] = WG[3] * fc[i];
    }

    for (j, &x) in XGK.iter().enumerate().take(7) {
        let lo = f(center - half * x)?;
        let hi = f(center + half * x)?;
        for i in 0..N {
            let pair = lo[i] + hi[i];
            resk[i] += WGK[j] * pair;
            if j % 2 == 1 {
                // odd Kronrod indices are the embedded Gauss nodes
                resg[i] += WG[j / 2] * pair;
            }
        }
    }

    let mut err: f64 = 0.0;
    let mut value = [0.0; N];
    for i in 0..N {
        value[i] = resk[i] * half;
        err = err.max((resk[i] - resg[i]).abs() * half.abs());
    }
    Ok((value, err))
}

/// Adaptively integrates `f` over the union of the panels delimited by
/// `breakpoints` (sorted ascending). The worst panel is halved until the
/// summed error estimate drops below `max(abs_tol, rel_tol * |I|_inf)` or
/// `max_refinements` splits have been spent.
///
/// Returns the integral per component together with the achieved error
/// estimate.
pub(crate) fn integrate_adaptive<const N: usize, F>(
    f: &mut F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_refinements: u32,
) -> Result<([f64; N], f64)>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    debug_assert!(breakpoints.len() >= 2);
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        let (value, error) = gk15(f, w[0], w[1])?;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut splits = 0;
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        let mut norm: f64 = 0.0;
        for i in 0..N {
            let c: f64 = heap.iter().map(|p| p.value[i]).sum();
            norm = norm.max(c.abs());
        }
        let target = abs_tol.max(rel_tol * norm);
        if total_err <= target {
            break;
        }
        if splits >= max_refinements {
            return Err(Error::Convergence {
                achieved: total_err,
                required: target,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; keep its estimate
            heap.push(worst);
            break;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(f, a, b)?;
            heap.push(Panel { a, b, value, error });
        }
        splits += 1;
    }

    // deterministic final summation in interval order
    let mut panels: Vec<Panel<N>> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut total = [0.0; N];
    let mut err = 0.0;
    for p in &panels {
        for i in 0..N {
            total[i] += p.value[i];
        }
        err += p.error;
    }
    Ok((total, err))
}
