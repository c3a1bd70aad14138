//! Minimal binary netpbm writers (P5 grayscale, P6 color).

use std::io::Write;

/// Binary PPM (P6) color image.
#[derive(Debug, Clone, PartialEq)]
pub struct Ppm {
    pub width: u32,
    pub height: u32,
    pub rgb: Vec<u8>,
}

impl Ppm {
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.rgb)
    }
}

/// Binary PGM (P5) 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: u32,
    pub height: u32,
    pub gray: Vec<u8>,
}

impl Pgm {
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.gray)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(self.gray.len() + 16);
        self.write(&mut v).expect("writing to memory");
        v
    }
}
