//! Interchange formats: planar_code streams, JSONL certificates and SVG drawings.

pub mod certificate;
pub mod planar_code;
pub mod svg;

pub use certificate::{CertificateRecord, Provenance, RecheckError};
pub use planar_code::PlanarCodeError;
