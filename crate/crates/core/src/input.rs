//! Loading any of the model file kinds by inspecting their top-level keys.

use std::path::Path;

use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::morse::{pearl_model_from_json, MorseData, PearlData};
use crate::scenarios::CapacityInstance;

#[derive(Clone, Debug)]
pub enum InputFile {
    /// Parsed without the axiom checks, so that violations can be reported.
    Complex(FilteredComplex),
    Instance(CapacityInstance),
    Pearl(PearlData, FilteredComplex),
    Morse(MorseData),
}

impl InputFile {
    pub fn kind(&self) -> &'static str {
        match self {
            InputFile::Complex(_) => "complex",
            InputFile::Instance(_) => "capacity instance",
            InputFile::Pearl(..) => "pearl model",
            InputFile::Morse(_) => "Morse data",
        }
    }

    /// The filtered complex, if the file carries one.
    pub fn complex(&self) -> Option<&FilteredComplex> {
        match self {
            InputFile::Complex(c) | InputFile::Pearl(_, c) => Some(c),
            InputFile::Instance(i) => Some(&i.complex),
            InputFile::Morse(_) => None,
        }
    }

    /// The complex after the axiom checks; Morse data has none.
    pub fn checked_complex(&self) -> Result<&FilteredComplex> {
        let cx = self
            .complex()
            .ok_or_else(|| Error::Input(format!("a {} file has no filtered complex", self.kind())))?;
        cx.validate().into_result()?;
        Ok(cx)
    }
}

/// Instance files carry `complex`, pearl files `pearl`, Morse files
/// `manifold_dim`; anything else is read as a complex.
pub fn parse_input(text: &str) -> Result<InputFile> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    if v.get("complex").is_some() {
        Ok(InputFile::Instance(CapacityInstance::from_json(text)?))
    } else if v.get("pearl").is_some() {
        let (pd, cx) = pearl_model_from_json(text)?;
        Ok(InputFile::Pearl(pd, cx))
    } else if v.get("manifold_dim").is_some() {
        Ok(InputFile::Morse(MorseData::from_json(text)?))
    } else {
        Ok(InputFile::Complex(FilteredComplex::from_json_unchecked(text)?))
    }
}

pub fn load_input(path: &Path) -> Result<InputFile> {
    parse_input(&crate::error::read_file(path)?)
}
