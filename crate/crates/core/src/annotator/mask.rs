use crate::raster_codec::{unpack_stencil, Raster};
use crate::scene_sim::ObjectClass;
use crate::error::{Error, Result};

/// Row-major set of pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: u32,
    pub height: u32,
    pub bits: Vec<bool>,
}

impl BinaryMask {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }
}

/// Pixels whose stencil class id is the vehicle code; flag bits are ignored.
pub fn vehicle_mask(stencil: &Raster) -> Result<BinaryMask> {
    let bytes = stencil
        .as_u8()
        .ok_or_else(|| Error::Format(format!("stencil raster must be U8, found {:?}", stencil.kind())))?;
    let code = ObjectClass::Vehicle.stencil_code();
    Ok(BinaryMask {
        width: stencil.width(),
        height: stencil.height(),
        bits: bytes.iter().map(|&b| unpack_stencil(b).class_id == code).collect(),
    })
}
