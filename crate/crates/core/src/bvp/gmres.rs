//! Unrestarted GMRES for the Newton systems of the conformal map.

/// Solves `A x = b` given `A` as a matrix-vector product. Returns `None`
/// if the relative residual does not reach `tol` within `max_iter` steps.
pub fn gmres(apply: impl Fn(&[f64]) -> Vec<f64>, b: &[f64], tol: f64, max_iter: usize) -> Option<Vec<f64>> {
    let n = b.len();
    let beta = norm(b);
    if beta == 0.0 {
        return Some(vec![0.0; n]);
    }
    let mut v: Vec<Vec<f64>> = vec![b.iter().map(|x| x / beta).collect()];
    let mut h: Vec<Vec<f64>> = Vec::new();
    let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut g = vec![beta];
    for k in 0..max_iter.min(n) {
        let mut w = apply(&v[k]);
        let mut col = vec![0.0; k + 2];
        for (i, vi) in v.iter().enumerate() {
            let d = dot(&w, vi);
            col[i] = d;
            w.iter_mut().zip(vi).for_each(|(a, b)| *a -= d * b);
        }
        let wn = norm(&w);
        col[k + 1] = wn;
        for i in 0..k {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let r = col[k].hypot(col[k + 1]);
        let (c, s) = (col[k] / r, col[k + 1] / r);
        cs.push(c);
        sn.push(s);
        col[k] = r;
        col[k + 1] = 0.0;
        g.push(-s * g[k]);
        g[k] *= c;
        h.push(col);
        let done = g[k + 1].abs() <= tol * beta;
        if done || wn == 0.0 {
            let m = k + 1;
            let mut y = vec![0.0; m];
            for i in (0..m).rev() {
                let s: f64 = (i + 1..m).map(|j| h[j][i] * y[j]).sum();
                y[i] = (g[i] - s) / h[i][i];
            }
            let mut x = vec![0.0; n];
            for (yi, vi) in y.iter().zip(&v) {
                x.iter_mut().zip(vi).for_each(|(a, b)| *a += yi * b);
            }
            return Some(x);
        }
        v.push(w.iter().map(|x| x / wn).collect());
    }
    None
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = [[4.0, 1.0, 0.0], [1.0, 3.0, -1.0], [0.5, 0.0, 2.0]];
        let apply = |x: &[f64]| (0..3).map(|i| (0..3).map(|j| a[i][j] * x[j]).sum()).collect();
        let b = [1.0, 2.0, 3.0];
        let x = gmres(apply, &b, 1e-14, 10).unwrap();
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i][j] * x[j]).sum::<f64>() - b[i];
            assert!(r.abs() < 1e-12);
        }
    }
}
