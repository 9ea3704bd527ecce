/* C API for the qsimd state-vector simulator.
 *
 * Mirrors crates/qsimd-ffi/src/lib.rs one to one; keep the two in sync.
 * All functions returning qsimd_status report QSIMD_OK (0) on success.
 */

#ifndef QSIMD_H
#define QSIMD_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsimd_status {
  QSIMD_OK = 0,
  QSIMD_NULL_POINTER = 1,
  QSIMD_INVALID_ARGUMENT = 2,
  QSIMD_ALLOCATION_FAILED = 3,
  QSIMD_OUT_OF_RANGE = 4,
  QSIMD_CONTROL_EQUALS_TARGET = 5,
  QSIMD_NON_UNITARY = 6,
  QSIMD_INTERNAL = 7,
} qsimd_status;

/* Allocation policies for qsimd_sim_create. */
enum {
  QSIMD_POLICY_DEFAULT = 0,    /* OS first-touch placement */
  QSIMD_POLICY_LOCAL_FIRST = 1, /* bind whole buffer to one NUMA node */
  QSIMD_POLICY_SPLIT_EVEN = 2,  /* near-equal segments across nodes */
};

/* Kernel variants for the apply/run calls. */
enum {
  QSIMD_KERNEL_SCALAR = 0,
  QSIMD_KERNEL_OPTIMIZED = 1,
};

/* QFT constructions for qsimd_run_qft. */
enum {
  QSIMD_QFT_RECURSIVE = 0,
  QSIMD_QFT_ITERATIVE = 1,
  QSIMD_QFT_BLOCKED = 2,
};

typedef struct qsimd_complex {
  double re;
  double im;
} qsimd_complex;

/* Opaque simulator handle. */
typedef struct QsimdSim QsimdSim;

/* Create a simulator holding a 2^num_qubits state initialized to |0...0>.
 * num_threads <= 1 runs serial; pin != 0 binds workers to NUMA nodes.
 * On success *out owns the simulator; release it with qsimd_sim_destroy. */
qsimd_status qsimd_sim_create(uint32_t num_qubits, int policy,
                              uint32_t num_threads, int pin, QsimdSim **out);

void qsimd_sim_destroy(QsimdSim *sim);

qsimd_status qsimd_sim_num_qubits(QsimdSim *sim, uint32_t *out);

qsimd_status qsimd_sim_total_probability(QsimdSim *sim, double *out);

qsimd_status qsimd_sim_get_amp(QsimdSim *sim, uint64_t index,
                               qsimd_complex *out);

qsimd_status qsimd_sim_set_amp(QsimdSim *sim, uint64_t index,
                               qsimd_complex value);

qsimd_status qsimd_apply_hadamard(QsimdSim *sim, uint32_t target, int variant);

qsimd_status qsimd_apply_pauli_x(QsimdSim *sim, uint32_t target, int variant);

qsimd_status qsimd_apply_pauli_y(QsimdSim *sim, uint32_t target, int variant);

/* matrix: 4 row-major entries m00, m01, m10, m11; must be unitary. */
qsimd_status qsimd_apply_unitary(QsimdSim *sim, uint32_t target,
                                 const qsimd_complex *matrix, int variant);

qsimd_status qsimd_apply_cnot(QsimdSim *sim, uint32_t control, uint32_t target,
                              int variant);

qsimd_status qsimd_apply_cphase(QsimdSim *sim, uint32_t control,
                                uint32_t target, double angle, int variant);

qsimd_status qsimd_apply_swap(QsimdSim *sim, uint32_t q1, uint32_t q2,
                              int variant);

/* block_factor applies only to QSIMD_QFT_BLOCKED. */
qsimd_status qsimd_run_qft(QsimdSim *sim, int qft_variant,
                           uint32_t block_factor, int kernel_variant);

/* Deterministic layered random circuit: same seed, same circuit. */
qsimd_status qsimd_run_rqc(QsimdSim *sim, uint32_t layers, uint64_t seed,
                           int kernel_variant);

/* Static string for a status code; do not free. */
const char *qsimd_status_name(qsimd_status status);

/* Library version; do not free. */
const char *qsimd_version(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QSIMD_H */
