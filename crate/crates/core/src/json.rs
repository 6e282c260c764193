//! JSON layouts for sequences and functions.
//!
//! Sequence: `{"re": [..], "im": [..]}` with `im` optional.
//! Function: `{"breakpoints": [..], "re": [..], "im": [..], "head": {"c": .., "gamma": ..}}`
//! with `im` and `head` optional. With a head, `breakpoints[0]` is where the
//! head ends and `re`/`im` hold the values of the later pieces, one fewer
//! than `breakpoints`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ComplexSeq, HeadedStepFunction, PowerHead, StepFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqJson {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadJson {
    pub c: f64,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FnJson {
    pub breakpoints: Vec<f64>,
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<HeadJson>,
}

fn complex_values(re: &[f64], im: Option<&Vec<f64>>) -> Result<Vec<Complex64>> {
    match im {
        None => Ok(re.iter().map(|&r| Complex64::new(r, 0.0)).collect()),
        Some(im) => {
            if im.len() != re.len() {
                return Err(Error::LengthMismatch { what: "imaginary parts", expected: re.len(), got: im.len() });
            }
            Ok(re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect())
        }
    }
}

fn split(values: &[Complex64]) -> (Vec<f64>, Option<Vec<f64>>) {
    let re = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    (re, im.iter().any(|&v| v != 0.0).then_some(im))
}

impl SeqJson {
    pub fn to_seq(&self) -> Result<ComplexSeq> {
        ComplexSeq::new(complex_values(&self.re, self.im.as_ref())?)
    }
}

impl From<&ComplexSeq> for SeqJson {
    fn from(c: &ComplexSeq) -> Self {
        let (re, im) = split(c.as_slice());
        SeqJson { re, im }
    }
}

impl FnJson {
    pub fn to_headed(&self) -> Result<HeadedStepFunction> {
        let head = self.head.map(|h| PowerHead::new(h.c, h.gamma)).transpose()?;
        HeadedStepFunction::new(head, self.breakpoints.clone(), complex_values(&self.re, self.im.as_ref())?)
    }

    /// The plain step function; fails when a head is present.
    pub fn to_step(&self) -> Result<StepFunction> {
        if self.head.is_some() {
            return Err(Error::InvalidParameter("expected a step function without head".into()));
        }
        StepFunction::new(self.breakpoints.clone(), complex_values(&self.re, self.im.as_ref())?)
    }
}

impl From<&StepFunction> for FnJson {
    fn from(f: &StepFunction) -> Self {
        let (re, im) = split(f.values());
        FnJson { breakpoints: f.breakpoints().to_vec(), re, im, head: None }
    }
}

fn read<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

pub fn read_seq(path: &Path) -> Result<ComplexSeq> {
    read::<SeqJson>(path)?.to_seq()
}

pub fn read_fn(path: &Path) -> Result<FnJson> {
    read(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_round_trip() {
        let c = ComplexSeq::new(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0)]).unwrap();
        let text = serde_json::to_string(&SeqJson::from(&c)).unwrap();
        let back: SeqJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_seq().unwrap(), c);
        let real: SeqJson = serde_json::from_str(r#"{"re": [1, 2]}"#).unwrap();
        assert_eq!(real.to_seq().unwrap(), ComplexSeq::from_real(&[1.0, 2.0]).unwrap());
        let bad: SeqJson = serde_json::from_str(r#"{"re": [1, 2], "im": [1]}"#).unwrap();
        assert!(bad.to_seq().is_err());
    }

    #[test]
    fn function_layouts() {
        let f: FnJson =
            serde_json::from_str(r#"{"breakpoints": [1, 2], "re": [3], "head": {"c": 1, "gamma": 1}}"#).unwrap();
        let h = f.to_headed().unwrap();
        assert_eq!(h.pieces().len(), 2);
        assert_eq!(h.eval(0.5).re, 0.5);
        assert_eq!(h.eval(1.5).re, 3.0);
        assert!(f.to_step().is_err());
        let g: FnJson = serde_json::from_str(r#"{"breakpoints": [1, 2], "re": [3, 4]}"#).unwrap();
        let s = g.to_step().unwrap();
        assert_eq!(FnJson::from(&s), g);
    }
}
