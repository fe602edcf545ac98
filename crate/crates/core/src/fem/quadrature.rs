//! Gauss rules on the unit interval and the reference triangle.

use crate::mesh::Vec2;

/// Rule on `[0, 1]`; weights sum to one.
#[derive(Clone, Debug)]
pub struct SegmentRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Rule on the reference triangle `(0,0), (1,0), (0,1)`; weights sum to 1/2.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
}

/// `n`-point Gauss-Legendre rule mapped to `[0, 1]` (exact to degree `2n - 1`).
pub fn gauss_legendre(n: usize) -> SegmentRule {
    assert!(n > 0);
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        points[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    SegmentRule { points, weights }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Segment rule exact for polynomials of degree `degree`.
pub fn segment_rule(degree: usize) -> SegmentRule {
    gauss_legendre(degree / 2 + 1)
}

/// Collapsed (Duffy) Gauss rule exact for polynomials of degree `degree` on
/// the reference triangle.
pub fn triangle_rule(degree: usize) -> TriangleRule {
    // The collapse adds one degree in the first direction.
    let n = (degree + 2).div_ceil(2);
    let g = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (i, &u) in g.points.iter().enumerate() {
        for (j, &v) in g.points.iter().enumerate() {
            points.push(Vec2::new(u, v * (1.0 - u)));
            weights.push(g.weights[i] * g.weights[j] * (1.0 - u));
        }
    }
    TriangleRule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn segment_exactness() {
        for d in 0..12 {
            let r = segment_rule(d);
            for p in 0..=d {
                let s: f64 = r.points.iter().zip(&r.weights).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn triangle_exactness() {
        // int_T x^a y^b = a! b! / (a + b + 2)!
        for d in 0..14 {
            let r = triangle_rule(d);
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let s: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(x, w)| w * x.x.powi(a as i32) * x.y.powi(b as i32))
                        .sum();
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    assert!((s - exact).abs() < 1e-14, "d={d} a={a} b={b}");
                }
            }
        }
    }
}
