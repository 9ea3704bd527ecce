//! Optimized kernels: block walk over the pair structure with manually
//! unrolled vector batches, dual-distance software prefetch, fused
//! multiply-add arithmetic and a scalar tail, plus run-structured walkers for
//! the controlled and swap gates.
//!
//! Arithmetic form is fixed per element independently of tuning knobs: any
//! block whose half-width holds at least [`FMA_MIN_HALF`] complexes uses the
//! fused form for every element (whether a vector batch or a scalar edge
//! processes it), smaller blocks use the plain form of the baseline. This
//! keeps results bit-identical across unroll/prefetch/batch settings and
//! across the instruction paths, which all implement the same per-element
//! operation order.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use super::scalar::{
    pair_exchange, pair_hadamard_plain, pair_pauli_y_plain, pair_unitary_plain, phase_mul_plain,
};
use super::{expand_both_set, expand_swap_pair, IsaPath, KernelConfig, SharedAmps, SingleQubitGate};
use crate::state::ComplexAmp;

/// Blocks whose half width reaches this many complexes take the vector/FMA
/// path; below it everything falls to the plain scalar tail (targets 0 and 1
/// with the default batch of 4).
const FMA_MIN_HALF: usize = 4;

// ---------------------------------------------------------------------------
// Prefetch
// ---------------------------------------------------------------------------

/// Advisory prefetch `dist_doubles` elements ahead of amplitude `idx`.
#[inline(always)]
fn prefetch1(amps: SharedAmps, idx: usize, dist_doubles: usize) {
    if dist_doubles == 0 {
        return;
    }
    #[cfg(target_arch = "x86_64")]
    // SAFETY: prefetch never faults; the address is only a hint.
    unsafe {
        use core::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
        let p = amps
            .base()
            .wrapping_add(idx * std::mem::size_of::<ComplexAmp>() + dist_doubles * 8);
        _mm_prefetch::<_MM_HINT_T0>(p.cast());
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        let _ = (amps, idx);
    }
}

#[inline(always)]
fn prefetch2(amps: SharedAmps, idx: usize, near: usize, far: usize) {
    prefetch1(amps, idx, near);
    prefetch1(amps, idx, far);
}

// ---------------------------------------------------------------------------
// Scalar fused-form element operations (the semantic reference for every
// vector batch below)
// ---------------------------------------------------------------------------

#[inline(always)]
unsafe fn elem_hadamard_fma(amps: SharedAmps, up: usize, lo: usize) {
    let a = amps.read(up);
    let b = amps.read(lo);
    let prod_re = FRAC_1_SQRT_2 * b.re;
    let prod_im = FRAC_1_SQRT_2 * b.im;
    amps.write(
        up,
        ComplexAmp::new(
            FRAC_1_SQRT_2.mul_add(a.re, prod_re),
            FRAC_1_SQRT_2.mul_add(a.im, prod_im),
        ),
    );
    amps.write(
        lo,
        ComplexAmp::new(
            FRAC_1_SQRT_2.mul_add(a.re, -prod_re),
            FRAC_1_SQRT_2.mul_add(a.im, -prod_im),
        ),
    );
}

/// m * z in the fused-multiply-add-with-alternating-sign order the vector
/// paths use.
#[inline(always)]
fn mul_fma(m: ComplexAmp, z: ComplexAmp) -> ComplexAmp {
    ComplexAmp::new(
        m.re.mul_add(z.re, -(m.im * z.im)),
        m.re.mul_add(z.im, m.im * z.re),
    )
}

#[inline(always)]
unsafe fn elem_unitary_fma(amps: SharedAmps, up: usize, lo: usize, m: &SingleQubitGate) {
    let a = amps.read(up);
    let b = amps.read(lo);
    let t1 = mul_fma(m.m00, a);
    let t2 = mul_fma(m.m01, b);
    let t3 = mul_fma(m.m10, a);
    let t4 = mul_fma(m.m11, b);
    amps.write(up, ComplexAmp::new(t1.re + t2.re, t1.im + t2.im));
    amps.write(lo, ComplexAmp::new(t3.re + t4.re, t3.im + t4.im));
}

#[inline(always)]
unsafe fn elem_phase_fma(amps: SharedAmps, idx: usize, cos_t: f64, sin_t: f64) {
    let z = amps.read(idx);
    amps.write(
        idx,
        ComplexAmp::new(
            cos_t.mul_add(z.re, -(sin_t * z.im)),
            cos_t.mul_add(z.im, sin_t * z.re),
        ),
    );
}

// ---------------------------------------------------------------------------
// Walk skeletons
// ---------------------------------------------------------------------------

/// Block walk for pair-structured gates, as in the fully optimized kernel:
/// unrolled vector loop, vector loop, scalar fallback. `batch` processes
/// `count` consecutive complexes per stream starting at the two indices;
/// `elem_fma`/`elem_plain` handle single pairs in the fused and plain forms.
#[inline(always)]
unsafe fn pair_skeleton(
    amps: SharedAmps,
    target: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
    batch: impl Fn(usize, usize, usize),
    elem_fma: impl Fn(usize, usize),
    elem_plain: impl Fn(usize, usize),
) {
    let half = 1usize << target;

    // Sub-vector-width blocks (targets 0 and 1 at the default batch of 4):
    // the vector-loop guards can never pass, so the whole range is the
    // scalar fallback. One flat pass; pairs share cache lines, so one
    // amortized prefetch per line covers both streams.
    if half < FMA_MIN_HALF {
        let small = cfg.prefetch_near / 2;
        let mask = half - 1;
        for task in tasks {
            let up = ((task >> target) << (target + 1)) | (task & mask);
            if up & 3 == 0 {
                prefetch1(amps, up, small);
            }
            elem_plain(up, up + half);
        }
        return;
    }

    let span = half << 1;
    let vc = cfg.vector_complexes;
    let unroll = cfg.unroll;
    let mut task = tasks.start;
    let end = tasks.end;

    while task < end {
        let block = task >> target;
        let base = block * span;
        let mut i = task - block * half;
        let i_end = half.min(i + (end - task));
        let consumed = i_end - i;

        // Align to full-width loads; plans always enter aligned, so this
        // only fires for hand-built task ranges.
        while i < i_end && !i.is_multiple_of(4) {
            elem_fma(base + i, base + i + half);
            i += 1;
        }
        while i + unroll <= i_end {
            let mut j = 0;
            while j < unroll {
                let up = base + i + j;
                prefetch2(amps, up, cfg.prefetch_near, cfg.prefetch_far);
                prefetch2(amps, up + half, cfg.prefetch_near, cfg.prefetch_far);
                batch(up, up + half, vc);
                j += vc;
            }
            i += unroll;
        }
        while i + vc <= i_end {
            let up = base + i;
            prefetch1(amps, up, cfg.prefetch_near);
            prefetch1(amps, up + half, cfg.prefetch_near);
            batch(up, up + half, vc);
            i += vc;
        }
        while i < i_end {
            elem_fma(base + i, base + i + half);
            i += 1;
        }
        task += consumed;
    }
}

/// Exchange `count` complexes between two streams, batched.
#[inline(always)]
unsafe fn run_exchange(
    amps: SharedAmps,
    a: usize,
    b: usize,
    count: usize,
    cfg: &KernelConfig,
    batch: &impl Fn(usize, usize, usize),
) {
    let vc = cfg.vector_complexes;
    let mut k = 0;
    while k + vc <= count {
        prefetch1(amps, a + k, cfg.prefetch_near);
        prefetch1(amps, b + k, cfg.prefetch_near);
        batch(a + k, b + k, vc);
        k += vc;
    }
    while k < count {
        pair_exchange(amps, a + k, b + k);
        k += 1;
    }
}

/// Pair walk for CNOT: only pairs whose `index_up` has the control bit set
/// are exchanged; skipped pairs are never read or written. When the control
/// sits above the target the test resolves once per block, otherwise
/// qualifying pairs form runs of 2^control inside each block.
#[inline(always)]
unsafe fn cnot_skeleton(
    amps: SharedAmps,
    control: usize,
    target: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
    batch: impl Fn(usize, usize, usize),
) {
    let half = 1usize << target;
    let span = half << 1;
    let mut task = tasks.start;
    let end = tasks.end;

    if half < FMA_MIN_HALF || control < 2 {
        // Batches cannot form (short blocks or sub-batch control runs); test
        // the control bit pair by pair in one flat pass.
        let mask = half - 1;
        for t in tasks {
            let up = ((t >> target) << (target + 1)) | (t & mask);
            if (up >> control) & 1 == 1 {
                pair_exchange(amps, up, up + half);
            }
        }
    } else if control > target {
        while task < end {
            let block = task >> target;
            let base = block * span;
            let i = task - block * half;
            let i_end = half.min(i + (end - task));
            if (base >> control) & 1 == 1 {
                run_exchange(amps, base + i, base + i + half, i_end - i, cfg, &batch);
            }
            task += i_end - i;
        }
    } else {
        let cbit = 1usize << control;
        let period = cbit << 1;
        while task < end {
            let block = task >> target;
            let base = block * span;
            let mut i = task - block * half;
            let i_end = half.min(i + (end - task));
            let consumed = i_end - i;
            while i < i_end {
                let phase = i & (period - 1);
                if phase < cbit {
                    i = (i - phase + cbit).min(i_end);
                    continue;
                }
                let run_end = (i - phase + period).min(i_end);
                run_exchange(amps, base + i, base + i + half, run_end - i, cfg, &batch);
                i = run_end;
            }
            task += consumed;
        }
    }
}

/// Walk over the quarter-space of indices with both qubit bits set,
/// which decomposes into contiguous runs of 2^low amplitudes.
#[inline(always)]
unsafe fn cphase_skeleton(
    amps: SharedAmps,
    low: usize,
    high: usize,
    angle: f64,
    tasks: Range<usize>,
    cfg: &KernelConfig,
    batch: impl Fn(usize, usize),
) {
    let (sin_t, cos_t) = angle.sin_cos();
    let run_len = 1usize << low;

    // Runs shorter than a vector batch: one flat plain-arithmetic pass.
    if run_len < FMA_MIN_HALF {
        for task in tasks {
            phase_mul_plain(amps, expand_both_set(task, low, high), cos_t, sin_t);
        }
        return;
    }

    let mut task = tasks.start;
    while task < tasks.end {
        let off = task & (run_len - 1);
        let count = (run_len - off).min(tasks.end - task);
        let idx = expand_both_set(task, low, high);
        let mut k = 0;
        while k < count && !(idx + k).is_multiple_of(4) {
            elem_phase_fma(amps, idx + k, cos_t, sin_t);
            k += 1;
        }
        let vc = cfg.vector_complexes;
        while k + vc <= count {
            prefetch1(amps, idx + k, cfg.prefetch_near);
            batch(idx + k, vc);
            k += vc;
        }
        while k < count {
            elem_phase_fma(amps, idx + k, cos_t, sin_t);
            k += 1;
        }
        task += count;
    }
}

/// Walk for SWAP: contiguous runs of exchanged index pairs.
#[inline(always)]
unsafe fn swap_skeleton(
    amps: SharedAmps,
    q1: usize,
    q2: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
    batch: impl Fn(usize, usize, usize),
) {
    let run_len = 1usize << q1.min(q2);

    if run_len < FMA_MIN_HALF {
        for task in tasks {
            let (a, b) = expand_swap_pair(task, q1, q2);
            pair_exchange(amps, a, b);
        }
        return;
    }

    let mut task = tasks.start;
    while task < tasks.end {
        let off = task & (run_len - 1);
        let count = (run_len - off).min(tasks.end - task);
        let (a, b) = expand_swap_pair(task, q1, q2);
        run_exchange(amps, a, b, count, cfg, &batch);
        task += count;
    }
}

// ---------------------------------------------------------------------------
// Portable batches (compiler-guided fallback)
// ---------------------------------------------------------------------------

#[inline(always)]
unsafe fn batch_hadamard_portable(amps: SharedAmps, up: usize, lo: usize, count: usize) {
    for k in 0..count {
        elem_hadamard_fma(amps, up + k, lo + k);
    }
}

#[inline(always)]
unsafe fn batch_unitary_portable(
    amps: SharedAmps,
    up: usize,
    lo: usize,
    count: usize,
    m: &SingleQubitGate,
) {
    for k in 0..count {
        elem_unitary_fma(amps, up + k, lo + k, m);
    }
}

#[inline(always)]
unsafe fn batch_pauli_y_portable(amps: SharedAmps, up: usize, lo: usize, count: usize) {
    for k in 0..count {
        pair_pauli_y_plain(amps, up + k, lo + k);
    }
}

#[inline(always)]
unsafe fn batch_exchange_portable(amps: SharedAmps, a: usize, b: usize, count: usize) {
    for k in 0..count {
        pair_exchange(amps, a + k, b + k);
    }
}

#[inline(always)]
unsafe fn batch_phase_portable(amps: SharedAmps, idx: usize, count: usize, cos_t: f64, sin_t: f64) {
    for k in 0..count {
        elem_phase_fma(amps, idx + k, cos_t, sin_t);
    }
}

// ---------------------------------------------------------------------------
// AVX-512 batches: 4 complexes (8 doubles) per operation, aligned loads and
// stores for the arithmetic gates, fused multiply-add/subtract pairs.
// ---------------------------------------------------------------------------

#[cfg(target_arch = "x86_64")]
mod avx512 {
    use super::*;
    use core::arch::x86_64::*;

    /// Swap re/im within each complex.
    #[inline(always)]
    unsafe fn swap_halves(v: __m512d) -> __m512d {
        _mm512_permute_pd::<0b0101_0101>(v)
    }

    #[inline(always)]
    unsafe fn xor_pd(a: __m512d, mask: __m512d) -> __m512d {
        // avx512f has no xor_pd; route through the integer domain.
        _mm512_castsi512_pd(_mm512_xor_si512(
            _mm512_castpd_si512(a),
            _mm512_castpd_si512(mask),
        ))
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn batch_hadamard(amps: SharedAmps, up: usize, lo: usize, count: usize) {
        let r = _mm512_set1_pd(FRAC_1_SQRT_2);
        let mut k = 0;
        while k + 4 <= count {
            let pu = amps.ptr_at(up + k);
            let pl = amps.ptr_at(lo + k);
            let data_up = _mm512_load_pd(pu);
            let data_lo = _mm512_load_pd(pl);
            let prod_lo = _mm512_mul_pd(r, data_lo);
            _mm512_store_pd(pu, _mm512_fmadd_pd(r, data_up, prod_lo));
            _mm512_store_pd(pl, _mm512_fmsub_pd(r, data_up, prod_lo));
            k += 4;
        }
        while k < count {
            elem_hadamard_fma(amps, up + k, lo + k);
            k += 1;
        }
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn batch_unitary(
        amps: SharedAmps,
        up: usize,
        lo: usize,
        count: usize,
        m: &SingleQubitGate,
    ) {
        let m00re = _mm512_set1_pd(m.m00.re);
        let m00im = _mm512_set1_pd(m.m00.im);
        let m01re = _mm512_set1_pd(m.m01.re);
        let m01im = _mm512_set1_pd(m.m01.im);
        let m10re = _mm512_set1_pd(m.m10.re);
        let m10im = _mm512_set1_pd(m.m10.im);
        let m11re = _mm512_set1_pd(m.m11.re);
        let m11im = _mm512_set1_pd(m.m11.im);
        let mut k = 0;
        while k + 4 <= count {
            let pu = amps.ptr_at(up + k);
            let pl = amps.ptr_at(lo + k);
            let a = _mm512_load_pd(pu);
            let b = _mm512_load_pd(pl);
            let a_sw = swap_halves(a);
            let b_sw = swap_halves(b);
            let t1 = _mm512_fmaddsub_pd(m00re, a, _mm512_mul_pd(m00im, a_sw));
            let t2 = _mm512_fmaddsub_pd(m01re, b, _mm512_mul_pd(m01im, b_sw));
            let t3 = _mm512_fmaddsub_pd(m10re, a, _mm512_mul_pd(m10im, a_sw));
            let t4 = _mm512_fmaddsub_pd(m11re, b, _mm512_mul_pd(m11im, b_sw));
            _mm512_store_pd(pu, _mm512_add_pd(t1, t2));
            _mm512_store_pd(pl, _mm512_add_pd(t3, t4));
            k += 4;
        }
        while k < count {
            elem_unitary_fma(amps, up + k, lo + k, m);
            k += 1;
        }
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn batch_pauli_y(amps: SharedAmps, up: usize, lo: usize, count: usize) {
        // up' = (lo.im, -lo.re), lo' = (-up.im, up.re): swap halves, flip one
        // sign lane. set_pd lists the highest element first.
        let neg_odd = _mm512_set_pd(-0.0, 0.0, -0.0, 0.0, -0.0, 0.0, -0.0, 0.0);
        let neg_even = _mm512_set_pd(0.0, -0.0, 0.0, -0.0, 0.0, -0.0, 0.0, -0.0);
        let mut k = 0;
        while k + 4 <= count {
            let pu = amps.ptr_at(up + k);
            let pl = amps.ptr_at(lo + k);
            let a = _mm512_load_pd(pu);
            let b = _mm512_load_pd(pl);
            _mm512_store_pd(pu, xor_pd(swap_halves(b), neg_odd));
            _mm512_store_pd(pl, xor_pd(swap_halves(a), neg_even));
            k += 4;
        }
        while k < count {
            pair_pauli_y_plain(amps, up + k, lo + k);
            k += 1;
        }
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn batch_exchange(amps: SharedAmps, a: usize, b: usize, count: usize) {
        let mut k = 0;
        while k + 4 <= count {
            let pa = amps.ptr_at(a + k);
            let pb = amps.ptr_at(b + k);
            let va = _mm512_loadu_pd(pa);
            let vb = _mm512_loadu_pd(pb);
            _mm512_storeu_pd(pa, vb);
            _mm512_storeu_pd(pb, va);
            k += 4;
        }
        while k < count {
            pair_exchange(amps, a + k, b + k);
            k += 1;
        }
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn batch_phase(
        amps: SharedAmps,
        idx: usize,
        count: usize,
        cos_t: f64,
        sin_t: f64,
    ) {
        let cv = _mm512_set1_pd(cos_t);
        let sv = _mm512_set1_pd(sin_t);
        let mut k = 0;
        while k + 4 <= count {
            let p = amps.ptr_at(idx + k);
            let z = _mm512_load_pd(p);
            let q = _mm512_mul_pd(sv, swap_halves(z));
            _mm512_store_pd(p, _mm512_fmaddsub_pd(cv, z, q));
            k += 4;
        }
        while k < count {
            elem_phase_fma(amps, idx + k, cos_t, sin_t);
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// AVX2 batches: 2 complexes (4 doubles) per operation.
// ---------------------------------------------------------------------------

#[cfg(target_arch = "x86_64")]
mod avx2 {
    use super::*;
    use core::arch::x86_64::*;

    #[inline(always)]
    unsafe fn swap_halves(v: __m256d) -> __m256d {
        _mm256_permute_pd::<0b0101>(v)
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn batch_hadamard(amps: SharedAmps, up: usize, lo: usize, count: usize) {
        let r = _mm256_set1_pd(FRAC_1_SQRT_2);
        let mut k = 0;
        while k + 2 <= count {
            let pu = amps.ptr_at(up + k);
            let pl = amps.ptr_at(lo + k);
            let data_up = _mm256_load_pd(pu);
            let data_lo = _mm256_load_pd(pl);
            let prod_lo = _mm256_mul_pd(r, data_lo);
            _mm256_store_pd(pu, _mm256_fmadd_pd(r, data_up, prod_lo));
            _mm256_store_pd(pl, _mm256_fmsub_pd(r, data_up, prod_lo));
            k += 2;
        }
        while k < count {
            elem_hadamard_fma(amps, up + k, lo + k);
            k += 1;
        }
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn batch_unitary(
        amps: SharedAmps,
        up: usize,
        lo: usize,
        count: usize,
        m: &SingleQubitGate,
    ) {
        let m00re = _mm256_set1_pd(m.m00.re);
        let m00im = _mm256_set1_pd(m.m00.im);
        let m01re = _mm256_set1_pd(m.m01.re);
        let m01im = _mm256_set1_pd(m.m01.im);
        let m10re = _mm256_set1_pd(m.m10.re);
        let m10im = _mm256_set1_pd(m.m10.im);
        let m11re = _mm256_set1_pd(m.m11.re);
        let m11im = _mm256_set1_pd(m.m11.im);
        let mut k = 0;
        while k + 2 <= count {
            let pu = amps.ptr_at(up + k);
            let pl = amps.ptr_at(lo + k);
            let a = _mm256_load_pd(pu);
            let b = _mm256_load_pd(pl);
            let a_sw = swap_halves(a);
            let b_sw = swap_halves(b);
            let t1 = _mm256_fmaddsub_pd(m00re, a, _mm256_mul_pd(m00im, a_sw));
            let t2 = _mm256_fmaddsub_pd(m01re, b, _mm256_mul_pd(m01im, b_sw));
            let t3 = _mm256_fmaddsub_pd(m10re, a, _mm256_mul_pd(m10im, a_sw));
            let t4 = _mm256_fmaddsub_pd(m11re, b, _mm256_mul_pd(m11im, b_sw));
            _mm256_store_pd(pu, _mm256_add_pd(t1, t2));
            _mm256_store_pd(pl, _mm256_add_pd(t3, t4));
            k += 2;
        }
        while k < count {
            elem_unitary_fma(amps, up + k, lo + k, m);
            k += 1;
        }
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn batch_pauli_y(amps: SharedAmps, up: usize, lo: usize, count: usize) {
        let neg_odd = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
        let neg_even = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
        let mut k = 0;
        while k + 2 <= count {
            let pu = amps.ptr_at(up + k);
            let pl = amps.ptr_at(lo + k);
            let a = _mm256_load_pd(pu);
            let b = _mm256_load_pd(pl);
            _mm256_store_pd(pu, _mm256_xor_pd(swap_halves(b), neg_odd));
            _mm256_store_pd(pl, _mm256_xor_pd(swap_halves(a), neg_even));
            k += 2;
        }
        while k < count {
            pair_pauli_y_plain(amps, up + k, lo + k);
            k += 1;
        }
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn batch_exchange(amps: SharedAmps, a: usize, b: usize, count: usize) {
        let mut k = 0;
        while k + 2 <= count {
            let pa = amps.ptr_at(a + k);
            let pb = amps.ptr_at(b + k);
            let va = _mm256_loadu_pd(pa);
            let vb = _mm256_loadu_pd(pb);
            _mm256_storeu_pd(pa, vb);
            _mm256_storeu_pd(pb, va);
            k += 2;
        }
        while k < count {
            pair_exchange(amps, a + k, b + k);
            k += 1;
        }
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn batch_phase(
        amps: SharedAmps,
        idx: usize,
        count: usize,
        cos_t: f64,
        sin_t: f64,
    ) {
        let cv = _mm256_set1_pd(cos_t);
        let sv = _mm256_set1_pd(sin_t);
        let mut k = 0;
        while k + 2 <= count {
            let p = amps.ptr_at(idx + k);
            let z = _mm256_load_pd(p);
            let q = _mm256_mul_pd(sv, swap_halves(z));
            _mm256_store_pd(p, _mm256_fmaddsub_pd(cv, z, q));
            k += 2;
        }
        while k < count {
            elem_phase_fma(amps, idx + k, cos_t, sin_t);
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Per-gate drivers: dispatch the instruction path once per range.
// ---------------------------------------------------------------------------

macro_rules! isa_dispatch {
    ($cfg:expr, $avx512:expr, $avx2:expr, $portable:expr) => {
        match $cfg.isa {
            #[cfg(target_arch = "x86_64")]
            IsaPath::Avx512 => $avx512,
            #[cfg(target_arch = "x86_64")]
            IsaPath::Avx2 => $avx2,
            _ => $portable,
        }
    };
}

pub(super) unsafe fn hadamard_range(
    amps: SharedAmps,
    target: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    isa_dispatch!(
        cfg,
        hadamard_avx512(amps, target, tasks, cfg),
        hadamard_avx2(amps, target, tasks, cfg),
        pair_skeleton(
            amps,
            target,
            tasks,
            cfg,
            |u, l, c| unsafe { batch_hadamard_portable(amps, u, l, c) },
            |u, l| unsafe { elem_hadamard_fma(amps, u, l) },
            |u, l| unsafe { pair_hadamard_plain(amps, u, l) },
        )
    )
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn hadamard_avx512(amps: SharedAmps, target: usize, tasks: Range<usize>, cfg: &KernelConfig) {
    pair_skeleton(
        amps,
        target,
        tasks,
        cfg,
        |u, l, c| unsafe { avx512::batch_hadamard(amps, u, l, c) },
        |u, l| unsafe { elem_hadamard_fma(amps, u, l) },
        |u, l| unsafe { pair_hadamard_plain(amps, u, l) },
    );
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn hadamard_avx2(amps: SharedAmps, target: usize, tasks: Range<usize>, cfg: &KernelConfig) {
    pair_skeleton(
        amps,
        target,
        tasks,
        cfg,
        |u, l, c| unsafe { avx2::batch_hadamard(amps, u, l, c) },
        |u, l| unsafe { elem_hadamard_fma(amps, u, l) },
        |u, l| unsafe { pair_hadamard_plain(amps, u, l) },
    );
}

pub(super) unsafe fn unitary_range(
    amps: SharedAmps,
    target: usize,
    gate: &SingleQubitGate,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    isa_dispatch!(
        cfg,
        unitary_avx512(amps, target, gate, tasks, cfg),
        unitary_avx2(amps, target, gate, tasks, cfg),
        pair_skeleton(
            amps,
            target,
            tasks,
            cfg,
            |u, l, c| unsafe { batch_unitary_portable(amps, u, l, c, gate) },
            |u, l| unsafe { elem_unitary_fma(amps, u, l, gate) },
            |u, l| unsafe { pair_unitary_plain(amps, u, l, gate) },
        )
    )
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn unitary_avx512(
    amps: SharedAmps,
    target: usize,
    gate: &SingleQubitGate,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    pair_skeleton(
        amps,
        target,
        tasks,
        cfg,
        |u, l, c| unsafe { avx512::batch_unitary(amps, u, l, c, gate) },
        |u, l| unsafe { elem_unitary_fma(amps, u, l, gate) },
        |u, l| unsafe { pair_unitary_plain(amps, u, l, gate) },
    );
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn unitary_avx2(
    amps: SharedAmps,
    target: usize,
    gate: &SingleQubitGate,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    pair_skeleton(
        amps,
        target,
        tasks,
        cfg,
        |u, l, c| unsafe { avx2::batch_unitary(amps, u, l, c, gate) },
        |u, l| unsafe { elem_unitary_fma(amps, u, l, gate) },
        |u, l| unsafe { pair_unitary_plain(amps, u, l, gate) },
    );
}

pub(super) unsafe fn pauli_x_range(
    amps: SharedAmps,
    target: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    isa_dispatch!(
        cfg,
        pauli_x_avx512(amps, target, tasks, cfg),
        pauli_x_avx2(amps, target, tasks, cfg),
        pair_skeleton(
            amps,
            target,
            tasks,
            cfg,
            |u, l, c| unsafe { batch_exchange_portable(amps, u, l, c) },
            |u, l| unsafe { pair_exchange(amps, u, l) },
            |u, l| unsafe { pair_exchange(amps, u, l) },
        )
    )
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn pauli_x_avx512(amps: SharedAmps, target: usize, tasks: Range<usize>, cfg: &KernelConfig) {
    pair_skeleton(
        amps,
        target,
        tasks,
        cfg,
        |u, l, c| unsafe { avx512::batch_exchange(amps, u, l, c) },
        |u, l| unsafe { pair_exchange(amps, u, l) },
        |u, l| unsafe { pair_exchange(amps, u, l) },
    );
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn pauli_x_avx2(amps: SharedAmps, target: usize, tasks: Range<usize>, cfg: &KernelConfig) {
    pair_skeleton(
        amps,
        target,
        tasks,
        cfg,
        |u, l, c| unsafe { avx2::batch_exchange(amps, u, l, c) },
        |u, l| unsafe { pair_exchange(amps, u, l) },
        |u, l| unsafe { pair_exchange(amps, u, l) },
    );
}

pub(super) unsafe fn pauli_y_range(
    amps: SharedAmps,
    target: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    isa_dispatch!(
        cfg,
        pauli_y_avx512(amps, target, tasks, cfg),
        pauli_y_avx2(amps, target, tasks, cfg),
        pair_skeleton(
            amps,
            target,
            tasks,
            cfg,
            |u, l, c| unsafe { batch_pauli_y_portable(amps, u, l, c) },
            |u, l| unsafe { pair_pauli_y_plain(amps, u, l) },
            |u, l| unsafe { pair_pauli_y_plain(amps, u, l) },
        )
    )
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn pauli_y_avx512(amps: SharedAmps, target: usize, tasks: Range<usize>, cfg: &KernelConfig) {
    pair_skeleton(
        amps,
        target,
        tasks,
        cfg,
        |u, l, c| unsafe { avx512::batch_pauli_y(amps, u, l, c) },
        |u, l| unsafe { pair_pauli_y_plain(amps, u, l) },
        |u, l| unsafe { pair_pauli_y_plain(amps, u, l) },
    );
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn pauli_y_avx2(amps: SharedAmps, target: usize, tasks: Range<usize>, cfg: &KernelConfig) {
    pair_skeleton(
        amps,
        target,
        tasks,
        cfg,
        |u, l, c| unsafe { avx2::batch_pauli_y(amps, u, l, c) },
        |u, l| unsafe { pair_pauli_y_plain(amps, u, l) },
        |u, l| unsafe { pair_pauli_y_plain(amps, u, l) },
    );
}

pub(super) unsafe fn cnot_range(
    amps: SharedAmps,
    control: usize,
    target: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    isa_dispatch!(
        cfg,
        cnot_avx512(amps, control, target, tasks, cfg),
        cnot_avx2(amps, control, target, tasks, cfg),
        cnot_skeleton(amps, control, target, tasks, cfg, |a, b, c| unsafe {
            batch_exchange_portable(amps, a, b, c)
        })
    )
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn cnot_avx512(
    amps: SharedAmps,
    control: usize,
    target: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    cnot_skeleton(amps, control, target, tasks, cfg, |a, b, c| unsafe {
        avx512::batch_exchange(amps, a, b, c)
    });
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn cnot_avx2(
    amps: SharedAmps,
    control: usize,
    target: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    cnot_skeleton(amps, control, target, tasks, cfg, |a, b, c| unsafe {
        avx2::batch_exchange(amps, a, b, c)
    });
}

pub(super) unsafe fn cphase_range(
    amps: SharedAmps,
    low: usize,
    high: usize,
    angle: f64,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    let (sin_t, cos_t) = angle.sin_cos();
    isa_dispatch!(
        cfg,
        cphase_avx512(amps, low, high, angle, tasks, cfg),
        cphase_avx2(amps, low, high, angle, tasks, cfg),
        cphase_skeleton(amps, low, high, angle, tasks, cfg, |idx, c| unsafe {
            batch_phase_portable(amps, idx, c, cos_t, sin_t)
        })
    )
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn cphase_avx512(
    amps: SharedAmps,
    low: usize,
    high: usize,
    angle: f64,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    let (sin_t, cos_t) = angle.sin_cos();
    cphase_skeleton(amps, low, high, angle, tasks, cfg, |idx, c| unsafe {
        avx512::batch_phase(amps, idx, c, cos_t, sin_t)
    });
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn cphase_avx2(
    amps: SharedAmps,
    low: usize,
    high: usize,
    angle: f64,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    let (sin_t, cos_t) = angle.sin_cos();
    cphase_skeleton(amps, low, high, angle, tasks, cfg, |idx, c| unsafe {
        avx2::batch_phase(amps, idx, c, cos_t, sin_t)
    });
}

pub(super) unsafe fn swap_range(
    amps: SharedAmps,
    q1: usize,
    q2: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    isa_dispatch!(
        cfg,
        swap_avx512(amps, q1, q2, tasks, cfg),
        swap_avx2(amps, q1, q2, tasks, cfg),
        swap_skeleton(amps, q1, q2, tasks, cfg, |a, b, c| unsafe {
            batch_exchange_portable(amps, a, b, c)
        })
    )
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn swap_avx512(
    amps: SharedAmps,
    q1: usize,
    q2: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    swap_skeleton(amps, q1, q2, tasks, cfg, |a, b, c| unsafe {
        avx512::batch_exchange(amps, a, b, c)
    });
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn swap_avx2(
    amps: SharedAmps,
    q1: usize,
    q2: usize,
    tasks: Range<usize>,
    cfg: &KernelConfig,
) {
    swap_skeleton(amps, q1, q2, tasks, cfg, |a, b, c| unsafe {
        avx2::batch_exchange(amps, a, b, c)
    });
}
