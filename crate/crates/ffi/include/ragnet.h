#ifndef RAGNET_H
#define RAGNET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RagnetStatus {
  RAGNET_STATUS_OK = 0,
  RAGNET_STATUS_NULL_POINTER = 1,
  /**
   * Parameters outside their domain.
   */
  RAGNET_STATUS_DOMAIN = 2,
  /**
   * The system is not stable at the requested point.
   */
  RAGNET_STATUS_UNSTABLE = 3,
  /**
   * The truncated chain did not capture enough mass.
   */
  RAGNET_STATUS_TRUNCATION = 4,
  /**
   * The boundary value problem is degenerate or under-resolved.
   */
  RAGNET_STATUS_DEGENERATE = 5,
  /**
   * Any other numerical failure.
   */
  RAGNET_STATUS_NUMERICAL = 6,
  RAGNET_STATUS_PANIC = 7,
} RagnetStatus;

typedef enum RagnetRegion {
  RAGNET_REGION_STABILITY = 0,
  RAGNET_REGION_THROUGHPUT = 1,
} RagnetRegion;

/**
 * Opaque solution of the symmetric boundary value problem.
 */
typedef struct RagnetBvp RagnetBvp;

/**
 * Opaque model parameters.
 */
typedef struct RagnetModel RagnetModel;

typedef struct RagnetSimStats {
  double mean_q1;
  double mean_q2;
  double p_empty1;
  double p_empty2;
  double throughput1;
  double throughput2;
  bool diverged;
} RagnetSimStats;

typedef struct RagnetOracle {
  size_t n;
  double tail_mass;
  double pi00;
  double mean_q1;
  double mean_q2;
} RagnetOracle;

typedef struct RagnetBounds {
  double l_low;
  double l_up;
  double gap;
  bool near_singular;
} RagnetBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ragnet_last_error(void);

enum RagnetStatus ragnet_model_new(double lambda1,
                                   double lambda2,
                                   double alpha1,
                                   double alpha2,
                                   double s1,
                                   double s2,
                                   double l1_plus,
                                   double l2_plus,
                                   struct RagnetModel **out);

/**
 * Both users share `lambda`, `alpha`, `s` and `l_plus`.
 */
enum RagnetStatus ragnet_model_symmetric(double lambda,
                                         double alpha,
                                         double s,
                                         double l_plus,
                                         struct RagnetModel **out);

void ragnet_model_free(struct RagnetModel *model);

/**
 * Writes 1 to `member` when `(lambda1, lambda2)` lies strictly inside the
 * region for the model's other parameters, else 0.
 */
enum RagnetStatus ragnet_region_member(const struct RagnetModel *model,
                                       enum RagnetRegion region,
                                       double lambda1,
                                       double lambda2,
                                       int32_t *member);

enum RagnetStatus ragnet_simulate(const struct RagnetModel *model,
                                  uint64_t slots,
                                  uint64_t burn_in,
                                  uint64_t seed,
                                  struct RagnetSimStats *out);

/**
 * Stationary law of the chain truncated at up to `n_max` packets per queue.
 * Pass 0 for `n_max` or `tail_tol` to use the defaults.
 */
enum RagnetStatus ragnet_oracle(const struct RagnetModel *model,
                                size_t n_max,
                                double tail_tol,
                                struct RagnetOracle *out);

/**
 * Bounds on the mean queue length of a symmetric model.
 */
enum RagnetStatus ragnet_queue_bounds(double lambda,
                                      double alpha,
                                      double s,
                                      double l_plus,
                                      struct RagnetBounds *out);

/**
 * Solves the symmetric boundary value problem on `m` nodes, a power of two.
 * With `adaptive` nonzero the grid is doubled until successive solutions agree.
 */
enum RagnetStatus ragnet_bvp_solve(double lambda,
                                   double alpha,
                                   double s,
                                   double l_plus,
                                   size_t m,
                                   int32_t adaptive,
                                   struct RagnetBvp **out);

void ragnet_bvp_free(struct RagnetBvp *sol);

/**
 * Probability that both queues are empty.
 */
double ragnet_bvp_pi00(const struct RagnetBvp *sol);

/**
 * Probability that user 1 is busy and user 2 is empty.
 */
double ragnet_bvp_pi10(const struct RagnetBvp *sol);

/**
 * Mean queue length of either user.
 */
double ragnet_bvp_mean(const struct RagnetBvp *sol);

/**
 * Number of nodes the solution was computed on.
 */
size_t ragnet_bvp_nodes(const struct RagnetBvp *sol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RAGNET_H */
