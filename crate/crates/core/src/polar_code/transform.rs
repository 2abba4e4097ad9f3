use crate::error::{Error, Result};

/// Multiplies `bits` by `F^{⊗n}` over GF(2), in place, natural index order.
///
/// The caller guarantees a power-of-two length. The transform is its own
/// inverse.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two());
    let mut half = 1;
    while half < len {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
}

/// Polar transform `bits · F^{⊗n}` of a power-of-two length bit vector.
pub fn polar_transform(bits: &[u8]) -> Result<Vec<u8>> {
    if !bits.len().is_power_of_two() {
        return Err(Error::invalid(
            "bits",
            format!("length {} is not a power of two", bits.len()),
        ));
    }
    let mut out = bits.to_vec();
    polar_transform_in_place(&mut out);
    Ok(out)
}
