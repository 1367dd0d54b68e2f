//! Central finite differences with Richardson extrapolation.

use crate::error::Result;

/// Weights of the `order`-th derivative at 0 for arbitrary distinct nodes
/// (Fornberg's recursion).
pub fn fornberg_weights(order: usize, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > order, "need more than {order} nodes");
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Half-width (in steps) of the second-order central stencil for `order`.
pub fn stencil_half_width(order: usize) -> usize {
    order.div_ceil(2).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error_estimate: f64,
}

/// `order`-th derivative of `f` at 0 from second-order central stencils with
/// steps `h, h/2, ..., h/2^levels`, combined by Richardson extrapolation in
/// powers of `h²`. The error estimate is the change made by the last level.
pub fn central_derivative<F>(mut f: F, order: usize, h: f64, levels: usize) -> Result<Derivative>
where
    F: FnMut(f64) -> Result<f64>,
{
    if order == 0 {
        return Ok(Derivative {
            value: f(0.0)?,
            error_estimate: 0.0,
        });
    }
    let p = stencil_half_width(order) as i64;
    let unit: Vec<f64> = (-p..=p).map(|k| k as f64).collect();
    let weights = fornberg_weights(order, &unit);

    let mut memo: Vec<(f64, f64)> = Vec::new();
    let mut eval = |s: f64| -> Result<f64> {
        if let Some(&(_, v)) = memo.iter().find(|(x, _)| *x == s) {
            return Ok(v);
        }
        let v = f(s)?;
        memo.push((s, v));
        Ok(v)
    };

    let mut table: Vec<f64> = Vec::with_capacity(levels + 1);
    let mut step = h;
    for _ in 0..=levels {
        let mut acc = 0.0;
        for (k, w) in unit.iter().zip(&weights) {
            if *w != 0.0 {
                acc += w * eval(k * step)?;
            }
        }
        table.push(acc / step.powi(order as i32));
        step *= 0.5;
    }

    // Neville-style tableau: column j removes the h^{2j} term.
    let mut prev_best = table[0];
    let mut best = table[0];
    let mut row = table.clone();
    for j in 1..=levels {
        let factor = 4f64.powi(j as i32);
        let next: Vec<f64> = row
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - 1.0))
            .collect();
        prev_best = *row.last().unwrap();
        best = *next.last().unwrap();
        row = next;
    }
    if levels == 0 {
        prev_best = best;
    }
    Ok(Derivative {
        value: best,
        error_estimate: (best - prev_best).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_classic_stencils() {
        let w = fornberg_weights(2, &[-1.0, 0.0, 1.0]);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
        let w = fornberg_weights(1, &[-1.0, 0.0, 1.0]);
        assert_eq!(w, vec![-0.5, 0.0, 0.5]);
        let w = fornberg_weights(4, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let expect = [1.0, -4.0, 6.0, -4.0, 1.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_of_exp() {
        for order in 1..=6 {
            let d = central_derivative(|s: f64| Ok((0.3 * s).exp()), order, 0.8, 2).unwrap();
            let exact = 0.3f64.powi(order as i32);
            assert!(
                (d.value - exact).abs() < 1e-6 * exact,
                "order {order}: {} vs {exact}",
                d.value
            );
        }
    }
}
