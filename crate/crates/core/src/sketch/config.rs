use crate::error::{Error, Result};

/// Shape of a co-occurring directions sketch.
///
/// `ell` is even and `2 <= ell <= min(mx, my)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SketchConfig {
    ell: usize,
    mx: usize,
    my: usize,
}

impl SketchConfig {
    pub fn new(ell: usize, mx: usize, my: usize) -> Result<Self> {
        if mx == 0 {
            return Err(Error::ZeroDimension("mx"));
        }
        if my == 0 {
            return Err(Error::ZeroDimension("my"));
        }
        validate_even_ell(ell, mx.min(my))?;
        Ok(Self { ell, mx, my })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn mx(&self) -> usize {
        self.mx
    }

    pub fn my(&self) -> usize {
        self.my
    }
}

/// Shared validation for the shrinking sketches: even, at least 2, at most `limit`.
pub(crate) fn validate_even_ell(ell: usize, limit: usize) -> Result<()> {
    if ell < 2 {
        return Err(Error::EllTooSmall { ell, min: 2 });
    }
    if !ell.is_multiple_of(2) {
        return Err(Error::OddEll(ell));
    }
    if ell > limit {
        return Err(Error::EllTooLarge { ell, limit });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid() {
        let c = SketchConfig::new(4, 10, 20).unwrap();
        assert_eq!((c.ell(), c.mx(), c.my()), (4, 10, 20));
        assert!(SketchConfig::new(10, 10, 20).is_ok());
    }

    #[test]
    fn distinct_errors() {
        let odd = SketchConfig::new(5, 10, 20).unwrap_err();
        assert!(matches!(odd, Error::OddEll(5)));
        assert!(odd.to_string().contains("ell must be even"));

        let big = SketchConfig::new(12, 10, 20).unwrap_err();
        assert!(matches!(big, Error::EllTooLarge { ell: 12, limit: 10 }));
        assert!(big.to_string().contains("ell exceeds min(mx,my)"));

        assert!(matches!(SketchConfig::new(0, 10, 20), Err(Error::EllTooSmall { .. })));
        assert!(matches!(SketchConfig::new(4, 0, 20), Err(Error::ZeroDimension("mx"))));
        assert!(matches!(SketchConfig::new(4, 10, 0), Err(Error::ZeroDimension("my"))));
    }
}
