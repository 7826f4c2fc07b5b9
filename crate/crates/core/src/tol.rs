/// Hybrid absolute/relative comparison tolerance.
///
/// Two reals are equal when `|a - b| <= tol * max(1, |a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    pub const fn new(tol: f64) -> Self {
        Tolerance(tol)
    }

    pub const fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn slack(self, a: f64, b: f64) -> f64 {
        self.0 * a.abs().max(b.abs()).max(1.0)
    }

    #[inline]
    pub fn eq(self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.slack(a, b)
    }

    /// `a <= b` up to the tolerance.
    #[inline]
    pub fn le(self, a: f64, b: f64) -> bool {
        a <= b + self.slack(a, b)
    }

    #[inline]
    pub fn is_zero(self, a: f64) -> bool {
        self.eq(a, 0.0)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hybrid_scale() {
        let t = Tolerance::new(1e-9);
        assert!(t.eq(1e-10, 0.0));
        assert!(!t.eq(1e-8, 0.0));
        assert!(t.eq(1e6, 1e6 + 1e-4));
        assert!(!t.eq(1e6, 1e6 + 1e-2));
        assert!(t.le(5.0 / 3.0 + 1e-12, 5.0 / 3.0));
        assert!(!t.le(2.0, 5.0 / 3.0));
    }
}
