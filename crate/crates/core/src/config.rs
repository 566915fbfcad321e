use crate::error::{Error, Result};
use crate::real::Real;

/// Scheme order `N`: global error scales as `τᴺ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Two,
    Four,
    Six,
    Eight,
}

impl Order {
    pub const ALL: [Order; 4] = [Order::Two, Order::Four, Order::Six, Order::Eight];

    pub fn as_u32(self) -> u32 {
        match self {
            Order::Two => 2,
            Order::Four => 4,
            Order::Six => 6,
            Order::Eight => 8,
        }
    }
}

impl TryFrom<u32> for Order {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        match n {
            2 => Ok(Order::Two),
            4 => Ok(Order::Four),
            6 => Ok(Order::Six),
            8 => Ok(Order::Eight),
            _ => Err(Error::UnsupportedOrder(n)),
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u32())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig<T> {
    pub order: Order,
    pub tau: T,
    /// Sup-norm step size of the push iteration relative to `‖p‖∞ + 1`.
    pub push_tol: T,
    pub push_max_iter: usize,
}

impl<T: Real> SchemeConfig<T> {
    pub fn new(order: Order, tau: T) -> Result<Self> {
        let cfg = Self {
            order,
            tau,
            push_tol: Self::default_push_tol(),
            push_max_iter: 25,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `1e-14`, or a few ulps for types coarser than `f64`.
    pub fn default_push_tol() -> T {
        T::lit(1e-14).max(T::epsilon() * T::lit(8.0))
    }

    pub fn with_push_tol(mut self, tol: T) -> Result<Self> {
        self.push_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn with_push_max_iter(mut self, n: usize) -> Result<Self> {
        self.push_max_iter = n;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > T::zero()) {
            return Err(Error::InvalidTimestep(self.tau.to_f64().unwrap_or(f64::NAN)));
        }
        if !(self.push_tol.is_finite() && self.push_tol > T::zero()) {
            return Err(Error::InvalidConfig("push_tol must be positive".into()));
        }
        if self.push_max_iter == 0 {
            return Err(Error::InvalidConfig("push_max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_conversion() {
        for n in [2, 4, 6, 8] {
            assert_eq!(Order::try_from(n).unwrap().as_u32(), n);
        }
        for n in [0, 1, 3, 5, 10] {
            assert_eq!(Order::try_from(n), Err(Error::UnsupportedOrder(n)));
        }
    }

    #[test]
    fn config_validation() {
        assert!(SchemeConfig::new(Order::Four, 0.1).is_ok());
        assert!(SchemeConfig::new(Order::Four, 0.0).is_err());
        assert!(SchemeConfig::new(Order::Four, -0.1).is_err());
        assert!(SchemeConfig::new(Order::Four, f64::NAN).is_err());
        let c = SchemeConfig::new(Order::Two, 0.1).unwrap();
        assert_eq!(c.push_tol, 1e-14);
        assert_eq!(c.push_max_iter, 25);
        assert!(c.with_push_tol(0.0).is_err());
        assert!(c.with_push_max_iter(0).is_err());
        assert!(SchemeConfig::<f32>::default_push_tol() > 1e-7);
    }
}
