//! Multi-axis FFT on flat row-major arrays.
//!
//! Grid sizes are powers of two, so all line/stride arithmetic reduces to
//! shifts and masks. Each axis pass gathers lines into a line-major
//! scratch matrix, batch-transforms the contiguous rows, and scatters
//! back; every phase is data-parallel over disjoint chunks.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use crate::parallel;

type PlanKey = (usize, bool);

static PLAN_CACHE: LazyLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn plan_for(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLAN_CACHE.lock().unwrap();
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::<f64>::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Unitary d-dimensional DFT over all axes, in place.
pub(crate) fn transform_all_axes(data: &mut [Complex64], n: usize, dim: usize, inverse: bool) {
    debug_assert!(n.is_power_of_two());
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let m = n.trailing_zeros() as usize;
    let plan = plan_for(n, inverse);
    let mut temp = vec![Complex64::default(); data.len()];

    for axis in 0..dim {
        let shift = m * (dim - 1 - axis);
        let low_mask = (1usize << shift) - 1;

        // Gather into line-major layout: temp[line*n + j] = data[flat].
        {
            let src = &*data;
            parallel::for_each_enumerated(&mut temp, |t, out| {
                let j = t & (n - 1);
                let line = t >> m;
                let flat = ((line >> shift) << (shift + m)) | (j << shift) | (line & low_mask);
                *out = src[flat];
            });
        }

        // Transform each contiguous row.
        parallel::for_each_block_mut(&mut temp, n, |_, row| {
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(row, &mut scratch);
        });

        // Scatter back.
        {
            let src = &*temp;
            parallel::for_each_enumerated(data, |flat, out| {
                let j = (flat >> shift) & (n - 1);
                let line = ((flat >> (shift + m)) << shift) | (flat & low_mask);
                *out = src[(line << m) | j];
            });
        }
    }

    let scale = 1.0 / (data.len() as f64).sqrt();
    parallel::for_each_enumerated(data, |_, z| *z *= scale);
}
