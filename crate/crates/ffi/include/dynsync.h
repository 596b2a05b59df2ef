#ifndef DYNSYNC_H
#define DYNSYNC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsModeClass {
  DS_MODE_CLASS_ZERO = 0,
  DS_MODE_CLASS_IMAGINARY = 1,
  DS_MODE_CLASS_DECAYING = 2,
} DsModeClass;

typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_POINTER = 1,
  DS_STATUS_INVALID_ARGUMENT = 2,
  DS_STATUS_SCHEMA = 3,
  DS_STATUS_DENSE_CAP_EXCEEDED = 4,
  DS_STATUS_NUMERICAL = 5,
  DS_STATUS_OUT_OF_RANGE = 6,
  DS_STATUS_PANIC = 7,
} DsStatus;

// A built Lindblad model.
typedef struct DsModel DsModel;

// Liouvillian eigenvalues with their classification.
typedef struct DsSpectrum DsSpectrum;

// Observable columns sampled on a uniform grid.
typedef struct DsTimeSeries DsTimeSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *ds_last_error(void);

// Library version as a static NUL-terminated string.
const char *ds_version(void);

// Spin-1 chain with per-site fields `omegas[0..n_sites]` and unit hopping.
//
// # Safety
// `omegas` must point to `n_sites` doubles and `out` must be writable.
enum DsStatus ds_model_spin1_new(size_t n_sites,
                                 const double *omegas,
                                 double anisotropy,
                                 double dephasing_rate,
                                 struct DsModel **out);

// Hubbard chain with unit tunneling.
//
// # Safety
// `omegas` and `chem_potentials` must point to `n_sites` doubles each and
// `out` must be writable.
enum DsStatus ds_model_hubbard_new(size_t n_sites,
                                   double interaction,
                                   const double *omegas,
                                   const double *chem_potentials,
                                   double dephasing_rate,
                                   struct DsModel **out);

// Model from a JSON record such as
// `{"kind":"spin1","n_sites":2,"omegas":[1,1],"anisotropy":0.5,"dephasing_rate":1}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` must be writable.
enum DsStatus ds_model_from_json(const char *json, struct DsModel **out);

// # Safety
// `model` must be null or a handle from a `ds_model_*` constructor.
void ds_model_free(struct DsModel *model);

// # Safety
// `model` must be a live handle and `out` writable.
enum DsStatus ds_model_hilbert_dim(const struct DsModel *model, size_t *out);

// Full Liouvillian spectrum.
//
// # Safety
// `model` must be a live handle and `out` writable.
enum DsStatus ds_spectrum_compute(const struct DsModel *model, struct DsSpectrum **out);

// # Safety
// `spec` must be null or a handle from [`ds_spectrum_compute`].
void ds_spectrum_free(struct DsSpectrum *spec);

// # Safety
// `spec` must be a live handle and `out` writable.
enum DsStatus ds_spectrum_len(const struct DsSpectrum *spec, size_t *out);

// Real and imaginary part of eigenvalue `index`.
//
// # Safety
// `spec` must be a live handle; `re` and `im` writable.
enum DsStatus ds_spectrum_eigenvalue(const struct DsSpectrum *spec,
                                     size_t index,
                                     double *re,
                                     double *im);

// Number of eigenvalues in `class`.
//
// # Safety
// `spec` must be a live handle and `out` writable.
enum DsStatus ds_spectrum_count(const struct DsSpectrum *spec,
                                enum DsModeClass class_,
                                size_t *out);

// Dense evolution from the product state named by `labels` (one per site,
// e.g. `"up"`, `"0"`, `"down"` for spin 1), recording `observable` on every
// site over `n_steps` steps of `[0, t_end]`.
//
// # Safety
// `labels` must point to `n_labels` NUL-terminated strings, `observable` must
// be NUL-terminated, `model` live and `out` writable.
enum DsStatus ds_evolve_dense(const struct DsModel *model,
                              const char *const *labels,
                              size_t n_labels,
                              double t_end,
                              size_t n_steps,
                              const char *observable,
                              struct DsTimeSeries **out);

// # Safety
// `ts` must be null or a handle from [`ds_evolve_dense`].
void ds_timeseries_free(struct DsTimeSeries *ts);

// Number of time samples.
//
// # Safety
// `ts` must be a live handle and `out` writable.
enum DsStatus ds_timeseries_len(const struct DsTimeSeries *ts, size_t *out);

// # Safety
// `ts` must be a live handle and `out` writable.
enum DsStatus ds_timeseries_n_columns(const struct DsTimeSeries *ts, size_t *out);

// Copies the sample times into `buf`, which holds `cap` doubles.
//
// # Safety
// `buf` must be writable for `cap` doubles.
enum DsStatus ds_timeseries_times(const struct DsTimeSeries *ts, double *buf, size_t cap);

// Copies column `index` into `buf`, which holds `cap` doubles.
//
// # Safety
// `buf` must be writable for `cap` doubles.
enum DsStatus ds_timeseries_column(const struct DsTimeSeries *ts,
                                   size_t index,
                                   double *buf,
                                   size_t cap);

// Label of column `index`; the pointer lives as long as `ts`.
//
// # Safety
// `ts` must be a live handle and `out` writable.
enum DsStatus ds_timeseries_label(const struct DsTimeSeries *ts, size_t index, const char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNSYNC_H */
