use crate::error::{Error, Result};

/// Stencil byte split into a 4-bit class id (low nibble) and 4 flag bits (high nibble).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StencilValue {
    pub class_id: u8,
    pub flags: u8,
}

impl StencilValue {
    pub fn new(class_id: u8, flags: u8) -> Result<Self> {
        if class_id > 0x0F || flags > 0x0F {
            return Err(Error::Domain(format!(
                "stencil fields must fit in 4 bits, got class_id={class_id} flags={flags}"
            )));
        }
        Ok(Self { class_id, flags })
    }
}

pub fn pack_stencil(v: StencilValue) -> Result<u8> {
    let v = StencilValue::new(v.class_id, v.flags)?;
    Ok((v.flags << 4) | v.class_id)
}

pub fn unpack_stencil(b: u8) -> StencilValue {
    StencilValue {
        class_id: b & 0x0F,
        flags: b >> 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(pack_stencil(StencilValue::new(3, 5).unwrap()).unwrap(), 0x53);
        assert_eq!(pack_stencil(StencilValue::new(0, 0).unwrap()).unwrap(), 0x00);
        assert_eq!(pack_stencil(StencilValue::new(15, 15).unwrap()).unwrap(), 0xFF);
        assert_eq!(unpack_stencil(0xF2), StencilValue { class_id: 2, flags: 15 });
        assert_eq!(unpack_stencil(0x00), StencilValue { class_id: 0, flags: 0 });
        assert_eq!(unpack_stencil(0x53), StencilValue { class_id: 3, flags: 5 });
    }

    #[test]
    fn out_of_range() {
        assert!(StencilValue::new(16, 0).is_err());
        let raw = StencilValue { class_id: 1, flags: 16 };
        assert!(matches!(pack_stencil(raw), Err(Error::Domain(_))));
    }

    #[test]
    fn bijection() {
        for b in 0..=255u8 {
            assert_eq!(pack_stencil(unpack_stencil(b)).unwrap(), b);
        }
    }
}
