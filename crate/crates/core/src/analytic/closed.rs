//! Closed-form solutions for the examples that have one.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Velocity components and, where the example defines one, the heat potential.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedValue {
    pub velocity: Vec<f64>,
    pub phi: Option<f64>,
}

/// `epsilon` is only read by example 1.
pub fn closed_form(
    example_id: u32,
    omega: f64,
    epsilon: f64,
    p: &[f64],
    t: f64,
) -> Result<ClosedValue> {
    let need = |rank: usize| {
        if p.len() == rank {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "example {example_id} takes {rank} coordinates, got {}",
                p.len()
            )))
        }
    };
    let pi2w = PI * PI * omega;
    Ok(match example_id {
        1 => {
            need(1)?;
            let e = (-pi2w * t).exp();
            let phi = epsilon + e * (PI * p[0]).cos();
            ClosedValue {
                velocity: vec![2.0 * omega * PI * e * (PI * p[0]).sin() / phi],
                phi: Some(phi / (epsilon + 1.0)),
            }
        }
        2 => {
            need(1)?;
            let e1 = (-pi2w * t).exp();
            let e4 = (-4.0 * pi2w * t).exp();
            let x = PI * p[0];
            let phi = 4.0 + e1 * x.cos() + 2.0 * e4 * (2.0 * x).cos();
            ClosedValue {
                velocity: vec![
                    2.0 * omega * PI * (e1 * x.sin() + 4.0 * e4 * (2.0 * x).sin()) / phi,
                ],
                phi: Some(phi / 7.0),
            }
        }
        5 => {
            need(1)?;
            let u = (-t).exp() * p[0].sin();
            ClosedValue {
                velocity: vec![u],
                phi: Some(u),
            }
        }
        6 => {
            need(2)?;
            let e = (-5.0 * pi2w * t).exp();
            let (x, y) = (PI * p[0], PI * p[1]);
            let phi = 2.0 + e * (2.0 * x).sin() * y.sin();
            ClosedValue {
                velocity: vec![
                    -4.0 * PI * omega * e * (2.0 * x).cos() * y.sin() / phi,
                    -2.0 * PI * omega * e * (2.0 * x).sin() * y.cos() / phi,
                ],
                phi: Some(phi / 2.0),
            }
        }
        8 => {
            need(3)?;
            let e = (-3.0 * pi2w * t).exp();
            let (s, c): (Vec<f64>, Vec<f64>) =
                p.iter().map(|x| ((PI * x).sin(), (PI * x).cos())).unzip();
            let phi = 1.0 + e * s[0] * s[1] * s[2];
            let k = -2.0 * PI * omega * e / phi;
            ClosedValue {
                velocity: vec![
                    k * c[0] * s[1] * s[2],
                    k * s[0] * c[1] * s[2],
                    k * s[0] * s[1] * c[2],
                ],
                phi: Some(phi),
            }
        }
        3 | 4 | 7 | 9 => {
            return Err(Error::Config(format!(
                "example {example_id} has no closed form; use its series oracle"
            )))
        }
        other => return Err(Error::UnknownExample(other)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example5_initial() {
        for x in [-3.0, -1.0, 0.5, 2.0] {
            assert_eq!(
                closed_form(5, 1.0, 0.0, &[x], 0.0).unwrap().velocity[0],
                f64::sin(x)
            );
        }
    }

    #[test]
    fn example1_walls_at_rest() {
        for t in [0.0, 0.1, 1.0] {
            for x in [0.0, 1.0] {
                let u = closed_form(1, 0.01, 2.0, &[x], t).unwrap().velocity[0];
                assert!(u.abs() < 1e-16);
            }
        }
    }

    #[test]
    fn example8_from_potential() {
        // u = -2 omega dphi/dx / phi with phi = 1 + E sin sin sin, by central differences
        let (omega, t) = (0.01, 1.0);
        let p = [0.3, 0.6, 0.25];
        let phi = |q: &[f64]| {
            1.0 + (-3.0 * PI * PI * omega * t).exp()
                * q.iter().map(|x| (PI * x).sin()).product::<f64>()
        };
        let v = closed_form(8, omega, 0.0, &p, t).unwrap().velocity;
        let h = 1e-5;
        for k in 0..3 {
            let mut a = p;
            let mut b = p;
            a[k] += h;
            b[k] -= h;
            let d = (phi(&a) - phi(&b)) / (2.0 * h);
            assert!((v[k] + 2.0 * omega * d / phi(&p)).abs() < 1e-10);
        }
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(
            closed_form(12, 1.0, 0.0, &[0.0], 0.0),
            Err(Error::UnknownExample(12))
        ));
    }
}
