/* SPDX-License-Identifier: Apache-2.0 */

/*
 * C interface to the line-based compressive sensing codec.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an lcs_status; on
 * failure lcs_last_error() describes the problem for the calling thread.
 */

#ifndef LCS_LCS_H
#define LCS_LCS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LCS_BUILDING_LIBRARY)
#    define LCS_API __declspec(dllexport)
#  else
#    define LCS_API __declspec(dllimport)
#  endif
#else
#  define LCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lcs_status {
  LCS_OK = 0,
  LCS_ERR_INVALID_ARGUMENT = 1, /* parameter outside its domain */
  LCS_ERR_DIMENSION = 2,        /* shapes do not agree */
  LCS_ERR_NOT_FOUND = 3,        /* input file missing */
  LCS_ERR_IO = 4,               /* read/write failure */
  LCS_ERR_MALFORMED = 5,        /* bad header, magic, or non-finite data */
  LCS_ERR_UNSUPPORTED = 6,      /* valid but unsupported (maxval, version) */
  LCS_ERR_TRUNCATED = 7,        /* data shorter/longer than declared */
  LCS_ERR_CAPACITY = 8,         /* dense operator above the entry cap */
  LCS_ERR_DIVERGENCE = 9,       /* solver produced non-finite values */
  LCS_ERR_MISMATCH = 10,        /* incompatible reports */
  LCS_ERR_INTERNAL = 99
} lcs_status;

typedef struct lcs_image lcs_image;
typedef struct lcs_sample lcs_sample;
typedef struct lcs_result lcs_result;
typedef struct lcs_report lcs_report;
typedef struct lcs_gains lcs_gains;

typedef enum lcs_tv_flavor { LCS_TV_ANISOTROPIC = 0, LCS_TV_ISOTROPIC = 1 } lcs_tv_flavor;

typedef struct lcs_solver_config {
  double lambda;
  double beta;
  int max_outer;
  int max_inner;
  double tol;
  lcs_tv_flavor tv_flavor;
  int threads;
} lcs_solver_config;

enum { LCS_SCHEME_PROPOSED = 1, LCS_SCHEME_CONVENTIONAL = 2 };

typedef struct lcs_eval_options {
  const double* rates;
  size_t num_rates;
  int trials;
  uint64_t base_seed;
  unsigned schemes; /* bitwise OR of LCS_SCHEME_* */
  size_t line_len;  /* 0: image width */
  uint64_t max_entries;
  int jobs;
  lcs_solver_config solver;
} lcs_eval_options;

LCS_API const char* lcs_version(void);
LCS_API const char* lcs_last_error(void);
LCS_API const char* lcs_status_name(lcs_status status);

/* Images */
LCS_API lcs_status lcs_image_create(size_t rows, size_t cols, const double* pixels, lcs_image** out);
LCS_API lcs_status lcs_image_load(const char* path, lcs_image** out);
LCS_API lcs_status lcs_image_save(const lcs_image* image, const char* path);
LCS_API size_t lcs_image_rows(const lcs_image* image);
LCS_API size_t lcs_image_cols(const lcs_image* image);
LCS_API const double* lcs_image_pixels(const lcs_image* image);
LCS_API void lcs_image_free(lcs_image* image);
LCS_API lcs_status lcs_psnr(const lcs_image* reference, const lcs_image* candidate, double* out_db);

/* Encoding */
LCS_API size_t lcs_measurement_count(double rate, size_t n);
LCS_API lcs_status lcs_encode_lines(const lcs_image* image, double rate, uint64_t seed,
                                    size_t line_len, lcs_sample** out);
LCS_API lcs_status lcs_encode_whole(const lcs_image* image, double rate, uint64_t seed,
                                    uint64_t max_entries, lcs_sample** out);
LCS_API uint64_t lcs_default_max_entries(void);

/* Samples and the LCS1 format */
LCS_API uint32_t lcs_sample_rows(const lcs_sample* sample);
LCS_API uint32_t lcs_sample_cols(const lcs_sample* sample);
LCS_API uint32_t lcs_sample_line_len(const lcs_sample* sample);
LCS_API uint32_t lcs_sample_m_per_line(const lcs_sample* sample);
LCS_API size_t lcs_sample_num_lines(const lcs_sample* sample);
LCS_API uint64_t lcs_sample_seed(const lcs_sample* sample);
LCS_API uint64_t lcs_sample_payload_bytes(const lcs_sample* sample);
LCS_API double lcs_sample_achieved_rate(const lcs_sample* sample);
LCS_API const double* lcs_sample_measurements(const lcs_sample* sample);
LCS_API lcs_status lcs_sample_serialize(const lcs_sample* sample, uint8_t** bytes, size_t* len);
LCS_API lcs_status lcs_sample_deserialize(const uint8_t* bytes, size_t len, lcs_sample** out);
LCS_API lcs_status lcs_sample_write(const lcs_sample* sample, const char* path);
LCS_API lcs_status lcs_sample_read(const char* path, lcs_sample** out);
LCS_API void lcs_sample_free(lcs_sample* sample);
LCS_API void lcs_buffer_free(void* buffer);

/* Reconstruction */
LCS_API void lcs_solver_config_default(lcs_solver_config* config);
LCS_API lcs_status lcs_reconstruct(const lcs_sample* sample, const lcs_solver_config* config,
                                   lcs_result** out);
LCS_API const lcs_image* lcs_result_image(const lcs_result* result);
LCS_API int lcs_result_iterations(const lcs_result* result);
LCS_API double lcs_result_rel_change(const lcs_result* result);
LCS_API size_t lcs_result_trace_len(const lcs_result* result);
LCS_API const double* lcs_result_trace(const lcs_result* result);
/* Iteration number of the failure after LCS_ERR_DIVERGENCE, else 0. */
LCS_API int lcs_last_divergence_iteration(void);
LCS_API void lcs_result_free(lcs_result* result);

/* Rate-distortion evaluation */
LCS_API void lcs_eval_options_default(lcs_eval_options* options);
/* recon_dir may be NULL; otherwise first-trial reconstructions are written
 * there as <scheme>_<rate>.pgm. */
LCS_API lcs_status lcs_evaluate(const lcs_image* image, const char* image_id,
                                const lcs_eval_options* options, const char* recon_dir,
                                lcs_report** out);
LCS_API size_t lcs_report_row_count(const lcs_report* report);
LCS_API size_t lcs_report_ok_count(const lcs_report* report);
LCS_API size_t lcs_report_mean_count(const lcs_report* report);
/* Mean row i: scheme (LCS_SCHEME_*), rate, and mean PSNR (NaN when no trial
 * succeeded). */
LCS_API lcs_status lcs_report_mean(const lcs_report* report, size_t i, unsigned* scheme,
                                   double* rate, double* mean_psnr_db);
LCS_API lcs_status lcs_report_write_csv(const lcs_report* report, const char* path);
LCS_API lcs_status lcs_report_write_json(const lcs_report* report, const char* path);
LCS_API lcs_status lcs_report_write_gnuplot(const lcs_report* report, const char* path);
LCS_API lcs_status lcs_report_read_csv(const char* path, lcs_report** out);
/* Bitwise OR of the schemes present in the report. */
LCS_API unsigned lcs_report_schemes(const lcs_report* report);
LCS_API void lcs_report_free(lcs_report* report);

LCS_API lcs_status lcs_compare(const lcs_report* a, unsigned scheme_a, const lcs_report* b,
                               unsigned scheme_b, lcs_gains** out);
LCS_API size_t lcs_gains_count(const lcs_gains* gains);
LCS_API double lcs_gains_rate(const lcs_gains* gains, size_t i);
LCS_API double lcs_gains_db(const lcs_gains* gains, size_t i);
LCS_API lcs_status lcs_gains_write_csv(const lcs_gains* gains, const char* path);
LCS_API void lcs_gains_free(lcs_gains* gains);

#ifdef __cplusplus
}
#endif

#endif /* LCS_LCS_H */
