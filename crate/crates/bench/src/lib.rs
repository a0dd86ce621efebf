//! Fixtures shared by the benchmarks.

use equitower::{Point, Space};

/// Deterministic rational points on a small grid, none repeated.
pub fn grid_points(space: &Space, count: usize) -> Vec<Point> {
    (0..count as i64)
        .map(|i| {
            let y = (i * 13) % 19 - 9;
            space.point(
                equitower::scalar::rat(2 * i - 33, 3),
                equitower::scalar::rat(y, 1 + i % 3),
            )
        })
        .collect()
}

/// Metrically collinear triples `(a, b, c)` with `b` a quarter of the way.
pub fn collinear_triples(space: &Space, count: usize) -> Vec<[Point; 3]> {
    grid_points(space, count + 1)
        .windows(2)
        .map(|w| {
            let a = w[0].clone();
            let c = w[1].add(&space.point(equitower::scalar::int(5), equitower::scalar::int(1)));
            let b = equitower::affine_combination(&a, &c, &equitower::scalar::rat(1, 4));
            [a, b, c]
        })
        .collect()
}
