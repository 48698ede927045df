use crate::error::{Error, Result};
use crate::sensing::{BodyPart, Embedding};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"FBNK";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegistrationMode {
    #[serde(rename = "full_360")]
    Full360,
    Standard,
}

impl RegistrationMode {
    fn to_byte(self) -> u8 {
        match self {
            Self::Full360 => 0,
            Self::Standard => 1,
        }
    }

    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Self::Full360),
            1 => Ok(Self::Standard),
            other => Err(Error::BankFormat(format!("unknown registration mode {other}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Full360 => "full_360",
            Self::Standard => "standard",
        }
    }
}

/// Normalized arithmetic mean of a set of embeddings.
pub fn bank_mean(part: &[Embedding]) -> Result<Embedding> {
    let first = part.first().ok_or(Error::EmptyBank)?;
    let mut acc = vec![0.0; first.dim()];
    for e in part {
        if e.dim() != acc.len() {
            return Err(Error::DimensionMismatch { left: acc.len(), right: e.dim() });
        }
        for (a, v) in acc.iter_mut().zip(e.values()) {
            *a += v;
        }
    }
    Embedding::normalized(acc)
}

/// Registered appearance of the target. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBank {
    mode: RegistrationMode,
    face_bank: Vec<Embedding>,
    torso_bank: Vec<Embedding>,
    face_mean: Option<Embedding>,
    torso_mean: Embedding,
}

impl FeatureBank {
    pub fn new(mode: RegistrationMode, face_bank: Vec<Embedding>, torso_bank: Vec<Embedding>) -> Result<Self> {
        if torso_bank.is_empty() {
            return Err(Error::Registration("no torso samples".into()));
        }
        let torso_mean = bank_mean(&torso_bank)?;
        let face_mean = if face_bank.is_empty() { None } else { Some(bank_mean(&face_bank)?) };
        if let Some(f) = &face_mean {
            if f.dim() != torso_mean.dim() {
                return Err(Error::DimensionMismatch { left: torso_mean.dim(), right: f.dim() });
            }
        }
        Ok(Self { mode, face_bank, torso_bank, face_mean, torso_mean })
    }

    pub fn mode(&self) -> RegistrationMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.torso_mean.dim()
    }

    pub fn face_bank(&self) -> &[Embedding] {
        &self.face_bank
    }

    pub fn torso_bank(&self) -> &[Embedding] {
        &self.torso_bank
    }

    pub fn face_mean(&self) -> Option<&Embedding> {
        self.face_mean.as_ref()
    }

    pub fn torso_mean(&self) -> &Embedding {
        &self.torso_mean
    }

    pub fn part(&self, part: BodyPart) -> &[Embedding] {
        match part {
            BodyPart::Face => &self.face_bank,
            BodyPart::Torso => &self.torso_bank,
        }
    }

    /// Serializes the bank.
    ///
    /// Layout, all integers `u32` little-endian:
    /// `"FBNK"`, version, mode byte (0 = full_360, 1 = standard), dim,
    /// face count, torso count, then the face vectors followed by the torso
    /// vectors as `f64` little-endian, `dim` values each.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let dim = u32::try_from(self.dim()).map_err(|_| Error::BankFormat("dimension too large".into()))?;
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&[self.mode.to_byte()])?;
        out.write_all(&dim.to_le_bytes())?;
        out.write_all(&(self.face_bank.len() as u32).to_le_bytes())?;
        out.write_all(&(self.torso_bank.len() as u32).to_le_bytes())?;
        for e in self.face_bank.iter().chain(&self.torso_bank) {
            for v in e.values() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        fn u32_of<R: Read>(r: &mut R) -> Result<u32> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            Ok(u32::from_le_bytes(b))
        }
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BankFormat("bad magic".into()));
        }
        let version = u32_of(&mut input)?;
        if version != FORMAT_VERSION {
            return Err(Error::BankFormat(format!("unsupported version {version}")));
        }
        let mut mode = [0u8; 1];
        input.read_exact(&mut mode)?;
        let mode = RegistrationMode::from_byte(mode[0])?;
        let dim = u32_of(&mut input)? as usize;
        let faces = u32_of(&mut input)? as usize;
        let torsos = u32_of(&mut input)? as usize;
        if dim == 0 || dim > 1 << 16 || faces > 1 << 20 || torsos > 1 << 20 {
            return Err(Error::BankFormat("implausible header".into()));
        }
        let read_vec = |input: &mut R| -> Result<Embedding> {
            let mut values = vec![0.0; dim];
            let mut b = [0u8; 8];
            for v in &mut values {
                input.read_exact(&mut b)?;
                *v = f64::from_le_bytes(b);
            }
            Embedding::from_unit(values)
        };
        let face_bank = (0..faces).map(|_| read_vec(&mut input)).collect::<Result<Vec<_>>>()?;
        let torso_bank = (0..torsos).map(|_| read_vec(&mut input)).collect::<Result<Vec<_>>>()?;
        Self::new(mode, face_bank, torso_bank)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
