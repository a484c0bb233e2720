use nm_tensor::{sigmoid, Volume};

use crate::error::NetError;

/// Cross-modulation fusion: O = a⊙σ(b) + b⊙σ(a). Symmetric in its
/// arguments, bit-exactly, because float addition and multiplication
/// commute.
pub fn cfi_forward(a: &Volume, b: &Volume) -> Result<Volume, NetError> {
    if a.channels != b.channels || a.dims != b.dims {
        return Err(NetError::ShapeMismatch {
            what: "fusion operands",
            expected: format!("{}x{}", a.channels, a.dims),
            got: format!("{}x{}", b.channels, b.dims),
        });
    }
    let mut out = a.clone();
    for (o, (x, y)) in out.data.iter_mut().zip(a.data.iter().zip(&b.data)) {
        *o = x * sigmoid(*y) + y * sigmoid(*x);
    }
    Ok(out)
}
