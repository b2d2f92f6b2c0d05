use super::grid::Grid;

/// Side of the largest uncovered axis-aligned square centered on each point.
///
/// A point at Chebyshev grid distance m from the nearest covered point sits in
/// an uncovered square of (2m - 1) points per side, i.e. (2m - 1) * step
/// meters. Covered points get 0; if nothing is covered every hole is infinite.
pub fn local_hole_sizes(covered: &[bool], grid: &Grid) -> Vec<f64> {
    assert_eq!(covered.len(), grid.len(), "mask and grid point counts differ");
    let hits: Vec<(i64, i64)> = (0..grid.len())
        .filter(|&i| covered[i])
        .map(|i| {
            let (x, y) = grid.coords(i);
            (x as i64, y as i64)
        })
        .collect();
    (0..grid.len())
        .map(|i| {
            if covered[i] {
                return 0.0;
            }
            let (x, y) = grid.coords(i);
            let (x, y) = (x as i64, y as i64);
            hits.iter()
                .map(|&(hx, hy)| (hx - x).abs().max((hy - y).abs()))
                .min()
                .map_or(f64::INFINITY, |m| (2 * m - 1) as f64 * grid.step_m)
        })
        .collect()
}

/// Point-wise union of several coverage vectors.
pub fn union(masks: &[&[bool]], len: usize) -> Vec<bool> {
    let mut out = vec![false; len];
    for m in masks {
        assert_eq!(m.len(), len, "mask length mismatch");
        for (o, &c) in out.iter_mut().zip(m.iter()) {
            *o |= c;
        }
    }
    out
}
