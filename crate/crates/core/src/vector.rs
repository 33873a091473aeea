//! Dense vectors and the handful of BLAS-1 kernels the recurrences need.

use nalgebra::DVector;

pub type Vector = DVector<f64>;

/// Euclidean norm with scaling, so that squaring cannot overflow or
/// underflow (the reference `dnrm2` scheme).
pub fn norm2(v: &[f64]) -> f64 {
    let mut scale = 0.0_f64;
    let mut ssq = 1.0_f64;
    for &x in v {
        if x != 0.0 {
            let ax = x.abs();
            if scale < ax {
                ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
                scale = ax;
            } else {
                ssq += (ax / scale) * (ax / scale);
            }
        }
    }
    scale * ssq.sqrt()
}

pub fn norm(v: &Vector) -> f64 {
    norm2(v.as_slice())
}

/// `‖a − b‖₂`
pub fn distance(a: &Vector, b: &Vector) -> f64 {
    norm(&(a - b))
}

/// `‖a − b‖₂ / max(‖b‖₂, floor)`
pub fn relative_distance(a: &Vector, b: &Vector, floor: f64) -> f64 {
    distance(a, b) / norm(b).max(floor)
}

/// `y ← y + a·x`
pub fn axpy(a: f64, x: &Vector, y: &mut Vector) {
    y.axpy(a, x, 1.0);
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[i] = 1.0;
    e
}

/// Reads one value per line; blank lines and lines starting with `#` or `%`
/// are ignored.
pub fn parse_vector(text: &str) -> std::result::Result<Vector, (usize, String)> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|e| (idx + 1, format!("invalid number {t:?}: {e}")))?;
        values.push(v);
    }
    Ok(Vector::from_vec(values))
}

pub fn format_vector(v: &Vector) -> String {
    let mut out = String::with_capacity(v.len() * 24);
    for x in v.iter() {
        out.push_str(&format!("{x}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_handles_extreme_magnitudes() {
        assert_eq!(norm2(&[3e300, 4e300]), 5e300);
        assert!((norm2(&[3e-300, 4e-300]) - 5e-300).abs() < 1e-314);
        assert_eq!(norm2(&[0.0, 0.0]), 0.0);
        assert_eq!(norm2(&[]), 0.0);
    }

    #[test]
    fn norm_is_zero_only_for_zero_vector() {
        assert!(norm2(&[0.0, 1e-320]) > 0.0);
    }

    #[test]
    fn vector_text_round_trip() {
        let v = Vector::from_vec(vec![0.1, -2.5e-17, 1.0 / 3.0]);
        let back = parse_vector(&format_vector(&v)).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn vector_parse_reports_line() {
        let err = parse_vector("1.0\n# c\nabc\n").unwrap_err();
        assert_eq!(err.0, 3);
    }
}
