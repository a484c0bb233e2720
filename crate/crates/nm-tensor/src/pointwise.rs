use crate::volume::{Sequence, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Sigmoid,
    Silu,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => relu(x),
            Activation::Sigmoid => sigmoid(x),
            Activation::Silu => silu(x),
        }
    }
}

#[inline]
pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    // Branch on sign so exp never overflows.
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^x), computed as max(x,0) + ln(1 + e^-|x|) for stability.
#[inline]
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[inline]
pub fn silu(x: f64) -> f64 {
    x * sigmoid(x)
}

pub fn pointwise(input: &Volume, act: Activation) -> Volume {
    let mut out = input.clone();
    for v in out.data.iter_mut() {
        *v = act.apply(*v);
    }
    out
}

pub fn pointwise_seq(input: &Sequence, act: Activation) -> Sequence {
    let mut out = input.clone();
    for v in out.data.iter_mut() {
        *v = act.apply(*v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_fixed_points() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
        assert!(sigmoid(800.0) <= 1.0 && sigmoid(800.0) > 0.999);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(-800.0) < 1e-300);
    }

    #[test]
    fn softplus_is_stable_and_positive() {
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        // Large arguments: softplus(x) ~ x, softplus(-x) ~ 0, no overflow.
        assert!((softplus(1000.0) - 1000.0).abs() < 1e-9);
        assert!(softplus(-1000.0) >= 0.0);
        assert!(softplus(-1000.0) < 1e-300);
        // Always exceeds relu.
        for x in [-3.0, -0.5, 0.0, 0.5, 3.0] {
            assert!(softplus(x) > relu(x) - 1e-15);
        }
    }

    #[test]
    fn relu_clamps_negatives() {
        assert_eq!(relu(-2.5), 0.0);
        assert_eq!(relu(0.0), 0.0);
        assert_eq!(relu(3.25), 3.25);
    }

    #[test]
    fn silu_matches_definition() {
        for x in [-2.0, -0.1, 0.0, 0.7, 5.0] {
            assert_eq!(silu(x), x * sigmoid(x));
        }
    }

    #[test]
    fn pointwise_maps_every_element() {
        let s = Sequence::new(2, 2, vec![-1.0, 2.0, 0.0, -3.0]).unwrap();
        let out = pointwise_seq(&s, Activation::Relu);
        assert_eq!(out.data, vec![0.0, 2.0, 0.0, 0.0]);
    }
}
