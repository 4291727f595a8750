#ifndef SUSCO_H
#define SUSCO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SuscoStatus {
  SUSCO_STATUS_OK = 0,
  SUSCO_STATUS_NULL_POINTER = 1,
  SUSCO_STATUS_INVALID_UTF8 = 2,
  SUSCO_STATUS_INVALID_CONFIG = 3,
  SUSCO_STATUS_IO = 4,
  SUSCO_STATUS_RUNTIME = 5,
  SUSCO_STATUS_OUT_OF_RANGE = 6,
  SUSCO_STATUS_PANIC = 7,
} SuscoStatus;

// Opaque simulation handle.
typedef struct SuscoSimulation SuscoSimulation;

// One interval's metrics. Energy in J, life in lifespan units, latency in ms.
typedef struct SuscoIntervalMetrics {
  uint32_t interval;
  uint32_t tasks_total;
  uint32_t tasks_offloaded;
  uint32_t tasks_unserved;
  uint32_t tasks_failed;
  double reduced_energy;
  double reduced_life_consumption;
  double reduced_latency;
  double total_payment;
  double total_budget;
  double sum_utility;
  double sum_cost;
  double utility_cost_ratio;
} SuscoIntervalMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a simulation from a TOML config file. The dish catalog is
// resolved relative to the file.
enum SuscoStatus susco_simulation_from_file(const char *path, struct SuscoSimulation **out);

// Creates a simulation from TOML text. Relative catalog paths resolve
// against `base_dir`, which may be null for the working directory.
enum SuscoStatus susco_simulation_from_toml(const char *toml,
                                            const char *base_dir,
                                            struct SuscoSimulation **out);

// Advances one interval. Returns `SUSCO_STATUS_OUT_OF_RANGE` once every
// configured interval has run.
enum SuscoStatus susco_simulation_step(struct SuscoSimulation *sim);

// Runs every remaining interval.
enum SuscoStatus susco_simulation_run(struct SuscoSimulation *sim);

// Number of intervals completed so far.
enum SuscoStatus susco_simulation_interval_count(const struct SuscoSimulation *sim, uint32_t *out);

// Copies the metrics of completed interval `index`.
enum SuscoStatus susco_simulation_metrics(const struct SuscoSimulation *sim,
                                          uint32_t index,
                                          struct SuscoIntervalMetrics *out);

// Writes metrics.csv, transcript.csv, summary.txt and config.toml into `dir`.
enum SuscoStatus susco_simulation_write_outputs(const struct SuscoSimulation *sim, const char *dir);

// Releases a handle. Null is ignored.
void susco_simulation_free(struct SuscoSimulation *sim);

// Cost a dish charges for `capacity_mb` at `bandwidth_mbps`.
enum SuscoStatus susco_dish_cost(double capacity_mb,
                                 double bandwidth_mbps,
                                 double per_gb,
                                 double per_second,
                                 double *out);

// Battery life consumed by a level drop from `before` to `after`.
enum SuscoStatus susco_life_consumption(double before, double after, double chemistry, double *out);

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into this library on the same thread.
const char *susco_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *susco_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUSCO_H */
