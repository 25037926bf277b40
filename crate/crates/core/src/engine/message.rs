use smallvec::SmallVec;

/// One or more B-bit message units travelling over a single edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MessageUnit {
    payload: SmallVec<[u8; 16]>,
    size_units: usize,
}

impl MessageUnit {
    /// Panics when `size_units == 0`.
    pub fn new(payload: &[u8], size_units: usize) -> Self {
        assert!(size_units >= 1, "a message occupies at least one unit");
        MessageUnit {
            payload: SmallVec::from_slice(payload),
            size_units,
        }
    }

    /// Big-endian encoding of `value` in as many units of `bandwidth_bits`
    /// as it needs (at least one).
    pub fn from_u64(value: u64, bandwidth_bits: usize) -> Self {
        let bits = (u64::BITS - value.leading_zeros()) as usize;
        let units = bits.div_ceil(bandwidth_bits.max(1)).max(1);
        MessageUnit {
            payload: SmallVec::from_slice(&value.to_be_bytes()),
            size_units: units,
        }
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn size_units(&self) -> usize {
        self.size_units
    }

    /// Number of significant bits in the big-endian payload.
    pub fn payload_bits(&self) -> usize {
        match self.payload.iter().position(|&b| b != 0) {
            None => 0,
            Some(i) => (self.payload.len() - i) * 8 - self.payload[i].leading_zeros() as usize,
        }
    }

    /// Interprets the last eight payload bytes as a big-endian integer.
    pub fn as_u64(&self) -> u64 {
        let bytes = &self.payload[self.payload.len().saturating_sub(8)..];
        bytes.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64)
    }

    pub fn fits(&self, bandwidth_bits: usize) -> bool {
        self.payload_bits() <= self.size_units * bandwidth_bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let m = MessageUnit::from_u64(0, 8);
        assert_eq!((m.size_units(), m.payload_bits()), (1, 0));
        let m = MessageUnit::from_u64(255, 8);
        assert_eq!((m.size_units(), m.payload_bits()), (1, 8));
        let m = MessageUnit::from_u64(256, 8);
        assert_eq!((m.size_units(), m.payload_bits()), (2, 9));
        assert_eq!(m.as_u64(), 256);
        assert!(!MessageUnit::new(&[1, 0], 1).fits(8));
        assert!(MessageUnit::new(&[0, 1], 1).fits(8));
    }
}
