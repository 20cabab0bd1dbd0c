#ifndef MRSIM_MRSIM_H
#define MRSIM_MRSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MRSIM_BUILDING_LIBRARY)
#define MRSIM_API __declspec(dllexport)
#else
#define MRSIM_API __declspec(dllimport)
#endif
#else
#define MRSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure mrsim_last_error() holds a
 * message for the calling thread until its next failing call. Output handles
 * are only written on success and must be released with their destroy
 * function. */
typedef enum mrsim_status {
  MRSIM_OK = 0,
  MRSIM_ERR_INVALID_ARGUMENT = 1,
  MRSIM_ERR_OUT_OF_RANGE = 2,
  MRSIM_ERR_UNSUPPORTED = 3,
  MRSIM_ERR_IO = 4,
  MRSIM_ERR_NUMERIC = 5,
  MRSIM_ERR_INTERNAL = 6
} mrsim_status;

MRSIM_API const char *mrsim_version(void);
MRSIM_API const char *mrsim_last_error(void);
MRSIM_API const char *mrsim_status_string(mrsim_status status);

typedef void (*mrsim_warning_fn)(const char *message, void *user);

/* ---- scanner configuration ---- */

typedef enum mrsim_scheme {
  MRSIM_SCHEME_CARTESIAN = 0,
  MRSIM_SCHEME_RADIAL = 1,
  MRSIM_SCHEME_SPIRAL = 2
} mrsim_scheme;

/* Zero scheme counts select the library defaults. */
typedef struct mrsim_scanner_config {
  double tr_ms;
  int nex;
  int matrix_pe;
  int matrix_fe;
  int scheme; /* mrsim_scheme */
  int radial_spokes;
  int golden_angle; /* radial spoke ordering: 0 sequential, 1 golden angle */
  int spiral_interleaves;
  double spiral_turns;
  double fov_mm; /* 0: spacing taken from the image */
} mrsim_scanner_config;

MRSIM_API void mrsim_scanner_config_init(mrsim_scanner_config *config);
MRSIM_API mrsim_status mrsim_parse_scheme(const char *name, int *scheme);
MRSIM_API const char *mrsim_scheme_name(int scheme);
MRSIM_API mrsim_status mrsim_validate_config(const mrsim_scanner_config *config);
MRSIM_API mrsim_status mrsim_scan_time_s(const mrsim_scanner_config *config, double *seconds);
MRSIM_API mrsim_status mrsim_shots_per_excitation(const mrsim_scanner_config *config, int *shots);

/* ---- images ---- */

typedef struct mrsim_image mrsim_image;

MRSIM_API mrsim_status mrsim_image_create(int width, int height, double pixel_spacing_mm, const double *pixels,
                                          mrsim_image **out);
MRSIM_API mrsim_status mrsim_image_load(const char *path, mrsim_warning_fn warn, void *user, mrsim_image **out);
/* Raw float32 little-endian plus a .json sidecar. */
MRSIM_API mrsim_status mrsim_image_save_raw(const mrsim_image *image, const char *path);
MRSIM_API mrsim_status mrsim_image_resize(const mrsim_image *image, int width, int height, mrsim_image **out);
/* Resizes to the config matrix and applies fov_mm when set. */
MRSIM_API mrsim_status mrsim_image_conform(const mrsim_image *image, const mrsim_scanner_config *config,
                                           mrsim_image **out);
MRSIM_API mrsim_status mrsim_image_info(const mrsim_image *image, int *width, int *height,
                                        double *pixel_spacing_mm);
MRSIM_API mrsim_status mrsim_image_pixels(const mrsim_image *image, double *out, size_t count);
MRSIM_API void mrsim_image_destroy(mrsim_image *image);

MRSIM_API mrsim_status mrsim_phantom_shepp_logan(int width, int height, double pixel_spacing_mm, mrsim_image **out);
MRSIM_API mrsim_status mrsim_phantom_random_head(int width, int height, uint64_t seed, double pixel_spacing_mm,
                                                 mrsim_image **out);

/* ---- motion trajectories ---- */

typedef struct mrsim_trajectory mrsim_trajectory;

/* Pose layout: tx_mm, ty_mm, tz_mm, rx_deg, ry_deg, rz_deg. */
MRSIM_API mrsim_status mrsim_trajectory_generate(size_t n_shots, double tr_ms, double rms_disp_mm,
                                                 double rms_rot_deg, uint64_t seed, int in_plane_only,
                                                 mrsim_trajectory **out);
MRSIM_API mrsim_status mrsim_trajectory_read_csv(const char *path, mrsim_trajectory **out);
MRSIM_API mrsim_status mrsim_trajectory_write_csv(const mrsim_trajectory *trajectory, const char *path);
MRSIM_API mrsim_status mrsim_trajectory_size(const mrsim_trajectory *trajectory, size_t *n_shots);
MRSIM_API mrsim_status mrsim_trajectory_pose(const mrsim_trajectory *trajectory, size_t shot, double pose[6]);
MRSIM_API mrsim_status mrsim_trajectory_severity(const mrsim_trajectory *trajectory, double *rms_disp_mm,
                                                 double *rms_rot_deg);
MRSIM_API void mrsim_trajectory_destroy(mrsim_trajectory *trajectory);

/* ---- sampling plans ---- */

typedef struct mrsim_plan mrsim_plan;

MRSIM_API mrsim_status mrsim_plan_create(const mrsim_scanner_config *config, mrsim_plan **out);
MRSIM_API mrsim_status mrsim_plan_counts(const mrsim_plan *plan, size_t *n_shots_total,
                                         size_t *samples_per_excitation);
/* Interleaved kx, ky of every sample of every shot, in time order;
 * `count` is the number of doubles available. */
MRSIM_API mrsim_status mrsim_plan_coords(const mrsim_plan *plan, double *kxky, size_t count);
MRSIM_API mrsim_status mrsim_plan_violations(const mrsim_plan *plan, size_t *n_violations);
MRSIM_API mrsim_status mrsim_plan_write_csv(const mrsim_plan *plan, const char *path);
MRSIM_API void mrsim_plan_destroy(mrsim_plan *plan);

/* ---- simulation ---- */

typedef struct mrsim_metrics {
  double rmse;
  double nrmse;
  double hf_ratio;
  double artifact_score;
} mrsim_metrics;

typedef struct mrsim_record mrsim_record;

/* The image must already match the config matrix (see mrsim_image_conform). */
MRSIM_API mrsim_status mrsim_corrupt_slice(const mrsim_image *image, const mrsim_scanner_config *config,
                                           double rms_disp_mm, double rms_rot_deg, uint64_t seed,
                                           mrsim_record **out);
MRSIM_API mrsim_status mrsim_record_set_id(mrsim_record *record, const char *id);
MRSIM_API mrsim_status mrsim_record_write(const mrsim_record *record, const char *dir);
MRSIM_API mrsim_status mrsim_record_read(const char *dir, mrsim_record **out);
MRSIM_API mrsim_status mrsim_record_metrics(const mrsim_record *record, mrsim_metrics *metrics);
/* which: 0 clean, 1 corrupted */
MRSIM_API mrsim_status mrsim_record_image(const mrsim_record *record, int which, mrsim_image **out);
MRSIM_API mrsim_status mrsim_record_error_map(const mrsim_record *record, uint8_t *out, size_t count);
MRSIM_API mrsim_status mrsim_record_trajectory(const mrsim_record *record, mrsim_trajectory **out);
/* Number of stored/recomputed mismatches (0: consistent). */
MRSIM_API mrsim_status mrsim_record_verify(const mrsim_record *record, size_t *n_mismatches);
MRSIM_API void mrsim_record_destroy(mrsim_record *record);

MRSIM_API mrsim_status mrsim_probe_features(const mrsim_image *image, double features[8]);

/* ---- datasets ---- */

typedef struct mrsim_batch_options {
  const char *input_dir;
  const char *output_dir;
  const char *schemes; /* comma separated, e.g. "cartesian,radial" */
  int trials;
  int threads; /* 0: hardware concurrency */
  uint64_t master_seed;
  mrsim_scanner_config base; /* scheme field ignored */
  mrsim_warning_fn warn;
  void *user;
} mrsim_batch_options;

MRSIM_API void mrsim_batch_options_init(mrsim_batch_options *options);
MRSIM_API mrsim_status mrsim_batch_run(const mrsim_batch_options *options, size_t *n_entries);

typedef struct mrsim_report mrsim_report;

/* Pools the manifests, checks pairing, and computes per-scheme distortion
 * and probe AUC over `repetitions` 70/30 splits. Writes the CSV when
 * csv_path is not NULL. */
MRSIM_API mrsim_status mrsim_compare_run(const char *const *manifests, size_t n_manifests, int repetitions,
                                         uint64_t seed, const char *csv_path, mrsim_report **out);
MRSIM_API const char *mrsim_report_text(const mrsim_report *report);
MRSIM_API mrsim_status mrsim_report_verdicts(const mrsim_report *report, int *degenerate, int *distortion_ordered,
                                             int *auc_ordered);
MRSIM_API void mrsim_report_destroy(mrsim_report *report);

#ifdef __cplusplus
}
#endif

#endif
