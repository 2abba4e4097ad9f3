use crate::error::{Error, Result};
use crate::polar_code::polar_transform_in_place;

/// Rebuilds the decoded vector from a path's final partial-sum banks.
///
/// After the last leaf, the bank of stage `t` holds the re-encoded bits
/// of the final left child at that stage, which covers positions
/// `[N - 2^(t+1), N - 2^t)`. The transform is an involution, so encoding
/// each bank again recovers its source bits; `tail` is the last bit.
pub fn recover_u(stage_sums: &[&[u8]], tail: u8) -> Result<Vec<u8>> {
    let n = stage_sums.len();
    let len = 1usize << n;
    let mut u = vec![0u8; len];
    for (t, bank) in stage_sums.iter().enumerate() {
        if bank.len() != 1 << t {
            return Err(Error::LengthMismatch { what: "partial-sum bank", expected: 1 << t, got: bank.len() });
        }
        let start = len - (2usize << t);
        let seg = &mut u[start..start + (1 << t)];
        seg.copy_from_slice(bank);
        polar_transform_in_place(seg);
    }
    u[len - 1] = tail & 1;
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_final_banks() {
        // u = [0,1,1,0, 1,0,1,1]: final left children are u[0..4], u[4..6], u[6]
        let u = [0u8, 1, 1, 0, 1, 0, 1, 1];
        let mut b2 = u[0..4].to_vec();
        polar_transform_in_place(&mut b2);
        let mut b1 = u[4..6].to_vec();
        polar_transform_in_place(&mut b1);
        let b0 = vec![u[6]];
        let got = recover_u(&[&b0, &b1, &b2], u[7]).unwrap();
        assert_eq!(got, u);
        assert!(recover_u(&[&b1], 0).is_err());
    }
}
