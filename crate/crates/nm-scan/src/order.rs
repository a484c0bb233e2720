use std::fmt;
use std::str::FromStr;

use nm_tensor::{Dims, Sequence, Volume};

use crate::error::ScanError;
use crate::hilbert::hilbert_order;

/// A serialization recipe. Primary rasters differ in which axis runs fastest;
/// each orientation has a crossing companion that swaps its two slower axes,
/// so every voxel's in-plane neighbors are nearby in at least one of the pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScanVariant {
    /// w fastest, then h, then d — the storage raster.
    TransversePrimary,
    /// h fastest, then w, then d.
    TransverseCross,
    /// d fastest, then w, then h.
    AxialPrimary,
    /// d fastest, then h, then w.
    AxialCross,
    /// Generalized Hilbert order.
    Hilbert,
    /// Any variant, visited back-to-front.
    Reverse(Box<ScanVariant>),
}

impl ScanVariant {
    /// The five non-composed variants.
    pub fn base_variants() -> Vec<ScanVariant> {
        vec![
            ScanVariant::TransversePrimary,
            ScanVariant::TransverseCross,
            ScanVariant::AxialPrimary,
            ScanVariant::AxialCross,
            ScanVariant::Hilbert,
        ]
    }
}

impl fmt::Display for ScanVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanVariant::TransversePrimary => write!(f, "transverse-primary"),
            ScanVariant::TransverseCross => write!(f, "transverse-cross"),
            ScanVariant::AxialPrimary => write!(f, "axial-primary"),
            ScanVariant::AxialCross => write!(f, "axial-cross"),
            ScanVariant::Hilbert => write!(f, "hilbert"),
            ScanVariant::Reverse(inner) => write!(f, "reverse:{}", inner),
        }
    }
}

impl FromStr for ScanVariant {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, ScanError> {
        match s {
            "transverse-primary" => Ok(ScanVariant::TransversePrimary),
            "transverse-cross" => Ok(ScanVariant::TransverseCross),
            "axial-primary" => Ok(ScanVariant::AxialPrimary),
            "axial-cross" => Ok(ScanVariant::AxialCross),
            "hilbert" => Ok(ScanVariant::Hilbert),
            _ => match s.strip_prefix("reverse:") {
                Some(inner) => Ok(ScanVariant::Reverse(Box::new(inner.parse()?))),
                None => Err(ScanError::UnknownVariant(s.to_string())),
            },
        }
    }
}

/// A built order: `perm[k]` is the flat voxel index visited at sequence
/// position `k`; `inv` is its inverse (`inv[perm[k]] = k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOrder {
    pub dims: Dims,
    pub variant: ScanVariant,
    pub perm: Vec<usize>,
    pub inv: Vec<usize>,
}

pub fn build_order(variant: &ScanVariant, dims: Dims) -> Result<ScanOrder, ScanError> {
    for (axis, extent) in [
        ("depth", dims.depth),
        ("height", dims.height),
        ("width", dims.width),
    ] {
        if extent == 0 {
            return Err(ScanError::EmptyAxis { axis });
        }
    }
    let perm = build_perm(variant, dims);
    let mut inv = vec![0usize; perm.len()];
    for (pos, &flat) in perm.iter().enumerate() {
        inv[flat] = pos;
    }
    Ok(ScanOrder {
        dims,
        variant: variant.clone(),
        perm,
        inv,
    })
}

fn build_perm(variant: &ScanVariant, dims: Dims) -> Vec<usize> {
    let (nd, nh, nw) = (dims.depth, dims.height, dims.width);
    let mut perm = Vec::with_capacity(dims.n());
    match variant {
        ScanVariant::TransversePrimary => {
            for d in 0..nd {
                for h in 0..nh {
                    for w in 0..nw {
                        perm.push(dims.flat(d, h, w));
                    }
                }
            }
        }
        ScanVariant::TransverseCross => {
            for d in 0..nd {
                for w in 0..nw {
                    for h in 0..nh {
                        perm.push(dims.flat(d, h, w));
                    }
                }
            }
        }
        ScanVariant::AxialPrimary => {
            for h in 0..nh {
                for w in 0..nw {
                    for d in 0..nd {
                        perm.push(dims.flat(d, h, w));
                    }
                }
            }
        }
        ScanVariant::AxialCross => {
            for w in 0..nw {
                for h in 0..nh {
                    for d in 0..nd {
                        perm.push(dims.flat(d, h, w));
                    }
                }
            }
        }
        ScanVariant::Hilbert => return hilbert_order(dims),
        ScanVariant::Reverse(inner) => {
            let mut p = build_perm(inner, dims);
            p.reverse();
            return p;
        }
    }
    perm
}

/// Serialize each channel of `x` along `order`.
pub fn flatten(x: &Volume, order: &ScanOrder) -> Result<Sequence, ScanError> {
    if x.dims != order.dims {
        return Err(ScanError::DimMismatch {
            expected: order.dims,
            got: x.dims,
        });
    }
    let n = order.perm.len();
    let mut out = Sequence::zeros(x.channels, n);
    for c in 0..x.channels {
        let ch = x.channel(c);
        let dst = &mut out.data[c * n..(c + 1) * n];
        for (pos, &flat) in order.perm.iter().enumerate() {
            dst[pos] = ch[flat];
        }
    }
    Ok(out)
}

/// Inverse of [`flatten`]: scatter a sequence back into a volume.
pub fn unflatten(seq: &Sequence, order: &ScanOrder) -> Result<Volume, ScanError> {
    let n = order.perm.len();
    if seq.len != n {
        return Err(ScanError::LengthMismatch {
            expected: n,
            got: seq.len,
        });
    }
    let mut out = Volume::zeros(seq.channels, order.dims);
    for c in 0..seq.channels {
        let src = seq.channel(c);
        let dst = &mut out.data[c * n..(c + 1) * n];
        for (pos, &flat) in order.perm.iter().enumerate() {
            dst[flat] = src[pos];
        }
    }
    Ok(out)
}

/// The four crossing-raster serializations of one volume: the transverse
/// pair (t1, t2) and the axial pair (a1, a2), with the orders that made them.
#[derive(Debug, Clone)]
pub struct ScanSequences {
    pub z_t1: Sequence,
    pub z_t2: Sequence,
    pub z_a1: Sequence,
    pub z_a2: Sequence,
    pub orders: [ScanOrder; 4],
}

impl ScanSequences {
    pub fn from_volume(x: &Volume) -> Result<ScanSequences, ScanError> {
        let o_t1 = build_order(&ScanVariant::TransversePrimary, x.dims)?;
        let o_t2 = build_order(&ScanVariant::TransverseCross, x.dims)?;
        let o_a1 = build_order(&ScanVariant::AxialPrimary, x.dims)?;
        let o_a2 = build_order(&ScanVariant::AxialCross, x.dims)?;
        Ok(ScanSequences {
            z_t1: flatten(x, &o_t1)?,
            z_t2: flatten(x, &o_t2)?,
            z_a1: flatten(x, &o_a1)?,
            z_a2: flatten(x, &o_a2)?,
            orders: [o_t1, o_t2, o_a1, o_a2],
        })
    }
}
