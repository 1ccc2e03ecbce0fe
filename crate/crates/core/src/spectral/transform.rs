use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Result};

/// Lines gathered per batch; each gathered row is one contiguous run of this many values.
const TILE: usize = 16;

/// Repeated length-`n` DFTs along the slowest axis of an `n x block` array.
///
/// Line `j` holds entries `j, block + j, 2·block + j, ...`. The forward
/// transform is the unnormalised DFT `F`; the inverse is `conj(F)/n`.
#[derive(Clone)]
pub struct LineTransformPlan {
    n: usize,
    block: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for LineTransformPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LineTransformPlan")
            .field("n", &self.n)
            .field("block", &self.block)
            .finish()
    }
}

/// Reusable buffers for [`LineTransformPlan`].
#[derive(Debug, Default, Clone)]
pub struct TransformScratch {
    tile: Vec<C64>,
    fft: Vec<C64>,
}

impl LineTransformPlan {
    pub fn new(n: usize, block: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            block,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn len(&self) -> usize {
        self.n * self.block
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `x ← (diag(s) F ⊗ I) x`.
    pub fn forward_in_place(
        &self,
        x: &mut [C64],
        scales: Option<&[C64]>,
        scratch: &mut TransformScratch,
    ) -> Result<()> {
        check_len(self.len(), x.len())?;
        if let Some(s) = scales {
            check_len(self.n, s.len())?;
        }
        self.run(x, scratch, &*self.forward, |line| {
            if let Some(s) = scales {
                for (v, &sk) in line.iter_mut().zip(s) {
                    *v *= sk;
                }
            }
        }, None);
        Ok(())
    }

    /// `x ← (conj(F)/n · diag(s) ⊗ I) x`.
    pub fn inverse_in_place(
        &self,
        x: &mut [C64],
        scales: Option<&[C64]>,
        scratch: &mut TransformScratch,
    ) -> Result<()> {
        check_len(self.len(), x.len())?;
        if let Some(s) = scales {
            check_len(self.n, s.len())?;
        }
        let inv_n = 1.0 / self.n as f64;
        self.run(x, scratch, &*self.inverse, |line| {
            for v in line.iter_mut() {
                *v *= inv_n;
            }
        }, scales);
        Ok(())
    }

    pub fn forward(&self, x: &[C64], scales: Option<&[C64]>) -> Result<Vec<C64>> {
        let mut y = x.to_vec();
        self.forward_in_place(&mut y, scales, &mut TransformScratch::default())?;
        Ok(y)
    }

    pub fn inverse(&self, x: &[C64], scales: Option<&[C64]>) -> Result<Vec<C64>> {
        let mut y = x.to_vec();
        self.inverse_in_place(&mut y, scales, &mut TransformScratch::default())?;
        Ok(y)
    }

    /// Gathers up to `TILE` lines, optionally pre-scales, transforms, post-processes, scatters.
    fn run(
        &self,
        x: &mut [C64],
        scratch: &mut TransformScratch,
        fft: &dyn Fft<f64>,
        post: impl Fn(&mut [C64]),
        pre_scales: Option<&[C64]>,
    ) {
        let n = self.n;
        let block = self.block;
        let fft_len = fft.get_inplace_scratch_len();
        if scratch.fft.len() < fft_len {
            scratch.fft.resize(fft_len, C64::new(0.0, 0.0));
        }
        if block == 1 {
            if let Some(s) = pre_scales {
                for (v, &sk) in x.iter_mut().zip(s) {
                    *v *= sk;
                }
            }
            fft.process_with_scratch(x, &mut scratch.fft[..fft_len]);
            post(x);
            return;
        }
        let tile = TILE.min(block);
        scratch.tile.resize(tile * n, C64::new(0.0, 0.0));
        let mut j0 = 0;
        while j0 < block {
            let width = tile.min(block - j0);
            let buf = &mut scratch.tile[..width * n];
            for k in 0..n {
                let row = &x[k * block + j0..k * block + j0 + width];
                let sk = pre_scales.map(|s| s[k]);
                for (t, &v) in row.iter().enumerate() {
                    buf[t * n + k] = match sk {
                        Some(s) => v * s,
                        None => v,
                    };
                }
            }
            fft.process_with_scratch(buf, &mut scratch.fft[..fft_len]);
            for line in buf.chunks_exact_mut(n) {
                post(line);
            }
            for k in 0..n {
                let row = &mut x[k * block + j0..k * block + j0 + width];
                for (t, v) in row.iter_mut().enumerate() {
                    *v = buf[t * n + k];
                }
            }
            j0 += width;
        }
    }
}
