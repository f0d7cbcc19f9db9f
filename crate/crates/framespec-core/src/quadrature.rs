//! Composite Gauss–Legendre quadrature on edge intervals.

use crate::scalar::{lit, Real};

/// 16-point Gauss–Legendre abscissae on [-1, 1] (positive half; rule is symmetric).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];

/// Matching 16-point weights.
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

/// Nodes and weights of the composite 16-point rule with `panels` panels on `[0, len]`.
pub fn nodes<T: Real>(len: T, panels: usize) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(panels * 16);
    let h = len / lit::<T>(panels as f64);
    let half = lit::<T>(0.5);
    for p in 0..panels {
        let a = h * lit::<T>(p as f64);
        let mid = a + h * half;
        let scale = h * half;
        for q in 0..8 {
            let x = lit::<T>(GL16_X[q]) * scale;
            let w = lit::<T>(GL16_W[q]) * scale;
            out.push((mid - x, w));
            out.push((mid + x, w));
        }
    }
    out
}

/// Integrate `f` over `[0, len]` with the composite rule.
pub fn integrate<T: Real, F: FnMut(T) -> T>(len: T, panels: usize, mut f: F) -> T {
    nodes(len, panels)
        .into_iter()
        .fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
}
