#include <mrsim/mrsim.h>

#include "core/acquisition.hpp"
#include "core/batch.hpp"
#include "core/compare.hpp"
#include "core/error.hpp"
#include "core/io.hpp"
#include "core/metrics.hpp"
#include "core/phantom.hpp"

#include <algorithm>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

struct mrsim_image
{
  mrsim::ImageSlice value;
};

struct mrsim_trajectory
{
  mrsim::MotionTrajectory value;
};

struct mrsim_plan
{
  mrsim::SamplingPlan value;
};

struct mrsim_record
{
  mrsim::SimulationRecord value;
};

struct mrsim_report
{
  mrsim::CompareReport value;
  std::string text;
};

namespace {

thread_local std::string last_error;

mrsim_status status_of(mrsim::ErrorCode code)
{
  switch (code) {
  case mrsim::ErrorCode::InvalidArgument: return MRSIM_ERR_INVALID_ARGUMENT;
  case mrsim::ErrorCode::OutOfRange: return MRSIM_ERR_OUT_OF_RANGE;
  case mrsim::ErrorCode::Unsupported: return MRSIM_ERR_UNSUPPORTED;
  case mrsim::ErrorCode::Io: return MRSIM_ERR_IO;
  case mrsim::ErrorCode::Numeric: return MRSIM_ERR_NUMERIC;
  }
  return MRSIM_ERR_INTERNAL;
}

template <typename Fn>
mrsim_status guard(Fn &&fn)
{
  try {
    fn();
    return MRSIM_OK;
  } catch (mrsim::Error const &e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (std::bad_alloc const &) {
    last_error = "out of memory";
    return MRSIM_ERR_INTERNAL;
  } catch (std::exception const &e) {
    last_error = e.what();
    return MRSIM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return MRSIM_ERR_INTERNAL;
  }
}

void need(void const *p, char const *name)
{
  if (!p) { mrsim::fail(mrsim::ErrorCode::InvalidArgument, std::string(name) + " is NULL"); }
}

mrsim::ScannerConfig to_core(mrsim_scanner_config const *c)
{
  need(c, "config");
  if (c->scheme < MRSIM_SCHEME_CARTESIAN || c->scheme > MRSIM_SCHEME_SPIRAL) {
    mrsim::fail(mrsim::ErrorCode::InvalidArgument, "unknown scheme value");
  }
  mrsim::ScannerConfig out;
  out.tr_ms = c->tr_ms;
  out.nex = c->nex;
  out.matrix_pe = c->matrix_pe;
  out.matrix_fe = c->matrix_fe;
  out.scheme = static_cast<mrsim::Scheme>(c->scheme);
  out.radial_spokes = c->radial_spokes;
  out.spoke_ordering = c->golden_angle ? mrsim::SpokeOrdering::GoldenAngle : mrsim::SpokeOrdering::Sequential;
  out.spiral_interleaves = c->spiral_interleaves;
  out.spiral_turns = c->spiral_turns;
  out.fov_mm = c->fov_mm;
  return out;
}

std::vector<mrsim::Scheme> parse_scheme_list(char const *text)
{
  need(text, "schemes");
  std::vector<mrsim::Scheme> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto const s = mrsim::parse_scheme(item);
    if (!s) { mrsim::fail(mrsim::ErrorCode::InvalidArgument, "unknown scheme '" + item + "'"); }
    out.push_back(*s);
  }
  return out;
}

void forward_warnings(std::vector<std::string> const &warnings, mrsim_warning_fn warn, void *user)
{
  if (!warn) { return; }
  for (auto const &w : warnings) {
    warn(w.c_str(), user);
  }
}

} // namespace

extern "C" {

const char *mrsim_version(void) { return MRSIM_VERSION_STRING; }

const char *mrsim_last_error(void) { return last_error.c_str(); }

const char *mrsim_status_string(mrsim_status status)
{
  switch (status) {
  case MRSIM_OK: return "ok";
  case MRSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
  case MRSIM_ERR_OUT_OF_RANGE: return "out of range";
  case MRSIM_ERR_UNSUPPORTED: return "unsupported";
  case MRSIM_ERR_IO: return "i/o error";
  case MRSIM_ERR_NUMERIC: return "numeric error";
  case MRSIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void mrsim_scanner_config_init(mrsim_scanner_config *config)
{
  if (!config) { return; }
  mrsim::ScannerConfig const d;
  *config = mrsim_scanner_config{d.tr_ms, d.nex, d.matrix_pe, d.matrix_fe, MRSIM_SCHEME_CARTESIAN, 0, 0, 0, 0.0, 0.0};
}

mrsim_status mrsim_parse_scheme(const char *name, int *scheme)
{
  return guard([&] {
    need(name, "name");
    need(scheme, "scheme");
    auto const s = mrsim::parse_scheme(name);
    if (!s) { mrsim::fail(mrsim::ErrorCode::InvalidArgument, std::string("unknown scheme '") + name + "'"); }
    *scheme = static_cast<int>(*s);
  });
}

const char *mrsim_scheme_name(int scheme)
{
  switch (scheme) {
  case MRSIM_SCHEME_CARTESIAN: return "cartesian";
  case MRSIM_SCHEME_RADIAL: return "radial";
  case MRSIM_SCHEME_SPIRAL: return "spiral";
  }
  return nullptr;
}

mrsim_status mrsim_validate_config(const mrsim_scanner_config *config)
{
  return guard([&] { mrsim::validate(to_core(config)); });
}

mrsim_status mrsim_scan_time_s(const mrsim_scanner_config *config, double *seconds)
{
  return guard([&] {
    need(seconds, "seconds");
    auto const c = to_core(config);
    mrsim::validate(c);
    *seconds = mrsim::scan_time_s(c);
  });
}

mrsim_status mrsim_shots_per_excitation(const mrsim_scanner_config *config, int *shots)
{
  return guard([&] {
    need(shots, "shots");
    auto const c = to_core(config);
    mrsim::validate(c);
    *shots = c.shots_per_excitation();
  });
}

mrsim_status mrsim_image_create(int width, int height, double pixel_spacing_mm, const double *pixels,
                                mrsim_image **out)
{
  return guard([&] {
    need(out, "out");
    need(pixels, "pixels");
    mrsim::ImageSlice img(width > 0 ? width : 0, height > 0 ? height : 0, pixel_spacing_mm);
    std::copy(pixels, pixels + img.size(), img.pixels.begin());
    mrsim::validate(img);
    *out = new mrsim_image{std::move(img)};
  });
}

mrsim_status mrsim_image_load(const char *path, mrsim_warning_fn warn, void *user, mrsim_image **out)
{
  return guard([&] {
    need(path, "path");
    need(out, "out");
    std::vector<std::string> warnings;
    auto img = mrsim::load_image(path, &warnings);
    forward_warnings(warnings, warn, user);
    *out = new mrsim_image{std::move(img)};
  });
}

mrsim_status mrsim_image_save_raw(const mrsim_image *image, const char *path)
{
  return guard([&] {
    need(image, "image");
    need(path, "path");
    mrsim::save_image_raw(image->value, path);
  });
}

mrsim_status mrsim_image_resize(const mrsim_image *image, int width, int height, mrsim_image **out)
{
  return guard([&] {
    need(image, "image");
    need(out, "out");
    *out = new mrsim_image{mrsim::resize_bilinear(image->value, width, height)};
  });
}

mrsim_status mrsim_image_conform(const mrsim_image *image, const mrsim_scanner_config *config, mrsim_image **out)
{
  return guard([&] {
    need(image, "image");
    need(out, "out");
    auto const c = to_core(config);
    mrsim::validate(c);
    *out = new mrsim_image{mrsim::conform_to_config(image->value, c)};
  });
}

mrsim_status mrsim_image_info(const mrsim_image *image, int *width, int *height, double *pixel_spacing_mm)
{
  return guard([&] {
    need(image, "image");
    if (width) { *width = image->value.width; }
    if (height) { *height = image->value.height; }
    if (pixel_spacing_mm) { *pixel_spacing_mm = image->value.pixel_spacing_mm; }
  });
}

mrsim_status mrsim_image_pixels(const mrsim_image *image, double *out, size_t count)
{
  return guard([&] {
    need(image, "image");
    need(out, "out");
    if (count < image->value.size()) { mrsim::fail(mrsim::ErrorCode::OutOfRange, "output buffer too small"); }
    std::copy(image->value.pixels.begin(), image->value.pixels.end(), out);
  });
}

void mrsim_image_destroy(mrsim_image *image) { delete image; }

mrsim_status mrsim_phantom_shepp_logan(int width, int height, double pixel_spacing_mm, mrsim_image **out)
{
  return guard([&] {
    need(out, "out");
    *out = new mrsim_image{mrsim::shepp_logan(width, height, pixel_spacing_mm)};
  });
}

mrsim_status mrsim_phantom_random_head(int width, int height, uint64_t seed, double pixel_spacing_mm,
                                       mrsim_image **out)
{
  return guard([&] {
    need(out, "out");
    *out = new mrsim_image{mrsim::random_head_phantom(width, height, seed, pixel_spacing_mm)};
  });
}

mrsim_status mrsim_trajectory_generate(size_t n_shots, double tr_ms, double rms_disp_mm, double rms_rot_deg,
                                       uint64_t seed, int in_plane_only, mrsim_trajectory **out)
{
  return guard([&] {
    need(out, "out");
    mrsim::TrajectoryOptions opt;
    opt.dof = in_plane_only ? mrsim::MotionDof::InPlane : mrsim::MotionDof::Six;
    *out = new mrsim_trajectory{
      mrsim::generate_random_trajectory(n_shots, tr_ms, {rms_disp_mm, rms_rot_deg}, seed, opt)};
  });
}

mrsim_status mrsim_trajectory_read_csv(const char *path, mrsim_trajectory **out)
{
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new mrsim_trajectory{mrsim::read_trajectory_csv(std::string(path))};
  });
}

mrsim_status mrsim_trajectory_write_csv(const mrsim_trajectory *trajectory, const char *path)
{
  return guard([&] {
    need(trajectory, "trajectory");
    need(path, "path");
    mrsim::write_trajectory_csv(trajectory->value, std::string(path));
  });
}

mrsim_status mrsim_trajectory_size(const mrsim_trajectory *trajectory, size_t *n_shots)
{
  return guard([&] {
    need(trajectory, "trajectory");
    need(n_shots, "n_shots");
    *n_shots = trajectory->value.size();
  });
}

mrsim_status mrsim_trajectory_pose(const mrsim_trajectory *trajectory, size_t shot, double pose[6])
{
  return guard([&] {
    need(trajectory, "trajectory");
    need(pose, "pose");
    auto const &p = mrsim::pose_at_shot(trajectory->value, shot);
    double const v[6] = {p.tx_mm, p.ty_mm, p.tz_mm, p.rx_deg, p.ry_deg, p.rz_deg};
    std::copy(v, v + 6, pose);
  });
}

mrsim_status mrsim_trajectory_severity(const mrsim_trajectory *trajectory, double *rms_disp_mm, double *rms_rot_deg)
{
  return guard([&] {
    need(trajectory, "trajectory");
    auto const s = mrsim::severity_rms(trajectory->value);
    if (rms_disp_mm) { *rms_disp_mm = s.rms_displacement_mm; }
    if (rms_rot_deg) { *rms_rot_deg = s.rms_rotation_deg; }
  });
}

void mrsim_trajectory_destroy(mrsim_trajectory *trajectory) { delete trajectory; }

mrsim_status mrsim_plan_create(const mrsim_scanner_config *config, mrsim_plan **out)
{
  return guard([&] {
    need(out, "out");
    *out = new mrsim_plan{mrsim::make_plan(to_core(config))};
  });
}

mrsim_status mrsim_plan_counts(const mrsim_plan *plan, size_t *n_shots_total, size_t *samples_per_excitation)
{
  return guard([&] {
    need(plan, "plan");
    if (n_shots_total) { *n_shots_total = plan->value.shots.size(); }
    if (samples_per_excitation) { *samples_per_excitation = plan->value.samples_per_excitation(); }
  });
}

mrsim_status mrsim_plan_coords(const mrsim_plan *plan, double *kxky, size_t count)
{
  return guard([&] {
    need(plan, "plan");
    need(kxky, "kxky");
    if (count < 2 * plan->value.total_samples()) {
      mrsim::fail(mrsim::ErrorCode::OutOfRange, "output buffer too small");
    }
    for (auto const &shot : plan->value.shots) {
      for (auto const &k : shot.samples) {
        *kxky++ = k.kx;
        *kxky++ = k.ky;
      }
    }
  });
}

mrsim_status mrsim_plan_violations(const mrsim_plan *plan, size_t *n_violations)
{
  return guard([&] {
    need(plan, "plan");
    need(n_violations, "n_violations");
    *n_violations = mrsim::validate_plan(plan->value).size();
  });
}

mrsim_status mrsim_plan_write_csv(const mrsim_plan *plan, const char *path)
{
  return guard([&] {
    need(plan, "plan");
    need(path, "path");
    mrsim::write_plan_csv(plan->value, std::string(path));
  });
}

void mrsim_plan_destroy(mrsim_plan *plan) { delete plan; }

mrsim_status mrsim_corrupt_slice(const mrsim_image *image, const mrsim_scanner_config *config, double rms_disp_mm,
                                 double rms_rot_deg, uint64_t seed, mrsim_record **out)
{
  return guard([&] {
    need(image, "image");
    need(out, "out");
    *out = new mrsim_record{mrsim::corrupt_slice(image->value, to_core(config), {rms_disp_mm, rms_rot_deg}, seed)};
  });
}

mrsim_status mrsim_record_set_id(mrsim_record *record, const char *id)
{
  return guard([&] {
    need(record, "record");
    need(id, "id");
    record->value.id = id;
  });
}

mrsim_status mrsim_record_write(const mrsim_record *record, const char *dir)
{
  return guard([&] {
    need(record, "record");
    need(dir, "dir");
    mrsim::write_record(record->value, dir);
  });
}

mrsim_status mrsim_record_read(const char *dir, mrsim_record **out)
{
  return guard([&] {
    need(dir, "dir");
    need(out, "out");
    *out = new mrsim_record{mrsim::read_record(dir)};
  });
}

mrsim_status mrsim_record_metrics(const mrsim_record *record, mrsim_metrics *metrics)
{
  return guard([&] {
    need(record, "record");
    need(metrics, "metrics");
    auto const &m = record->value.metrics;
    *metrics = mrsim_metrics{m.rmse, m.nrmse, m.highfreq_energy_ratio, m.artifact_score};
  });
}

mrsim_status mrsim_record_image(const mrsim_record *record, int which, mrsim_image **out)
{
  return guard([&] {
    need(record, "record");
    need(out, "out");
    if (which != 0 && which != 1) { mrsim::fail(mrsim::ErrorCode::InvalidArgument, "which must be 0 or 1"); }
    *out = new mrsim_image{which == 0 ? record->value.clean : record->value.corrupted};
  });
}

mrsim_status mrsim_record_error_map(const mrsim_record *record, uint8_t *out, size_t count)
{
  return guard([&] {
    need(record, "record");
    need(out, "out");
    auto const &v = record->value.error_map.values;
    if (count < v.size()) { mrsim::fail(mrsim::ErrorCode::OutOfRange, "output buffer too small"); }
    std::copy(v.begin(), v.end(), out);
  });
}

mrsim_status mrsim_record_trajectory(const mrsim_record *record, mrsim_trajectory **out)
{
  return guard([&] {
    need(record, "record");
    need(out, "out");
    *out = new mrsim_trajectory{record->value.trajectory};
  });
}

mrsim_status mrsim_record_verify(const mrsim_record *record, size_t *n_mismatches)
{
  return guard([&] {
    need(record, "record");
    need(n_mismatches, "n_mismatches");
    auto const issues = mrsim::verify_record(record->value);
    *n_mismatches = issues.size();
    if (!issues.empty()) { last_error = issues.front(); }
  });
}

void mrsim_record_destroy(mrsim_record *record) { delete record; }

mrsim_status mrsim_probe_features(const mrsim_image *image, double features[8])
{
  return guard([&] {
    need(image, "image");
    need(features, "features");
    auto const f = mrsim::probe_features(image->value);
    std::copy(f.begin(), f.end(), features);
  });
}

void mrsim_batch_options_init(mrsim_batch_options *options)
{
  if (!options) { return; }
  *options = mrsim_batch_options{};
  options->schemes = "cartesian";
  options->trials = 1;
  mrsim_scanner_config_init(&options->base);
}

mrsim_status mrsim_batch_run(const mrsim_batch_options *options, size_t *n_entries)
{
  return guard([&] {
    need(options, "options");
    need(options->input_dir, "input_dir");
    need(options->output_dir, "output_dir");
    mrsim::BatchOptions opt;
    opt.base = to_core(&options->base);
    opt.schemes = parse_scheme_list(options->schemes);
    opt.trials = options->trials;
    opt.threads = options->threads;
    opt.master_seed = options->master_seed;
    opt.output_dir = options->output_dir;
    opt.keep_records = false;
    std::vector<std::string> warnings;
    auto const images = mrsim::load_batch_inputs(options->input_dir, &warnings);
    forward_warnings(warnings, options->warn, options->user);
    auto const result = mrsim::run_batch(images, opt);
    if (n_entries) { *n_entries = result.manifest.entries.size(); }
  });
}

mrsim_status mrsim_compare_run(const char *const *manifests, size_t n_manifests, int repetitions, uint64_t seed,
                               const char *csv_path, mrsim_report **out)
{
  return guard([&] {
    need(out, "out");
    if (n_manifests == 0) { mrsim::fail(mrsim::ErrorCode::InvalidArgument, "no manifests given"); }
    need(manifests, "manifests");
    std::vector<mrsim::fs::path> paths;
    for (size_t i = 0; i < n_manifests; ++i) {
      need(manifests[i], "manifest path");
      paths.emplace_back(manifests[i]);
    }
    auto const samples = mrsim::load_compare_samples(paths);
    mrsim::CompareOptions opt;
    opt.repetitions = repetitions;
    opt.seed = seed;
    auto report = mrsim::compare_schemes(samples, opt);
    if (csv_path) { mrsim::write_compare_csv(report, csv_path); }
    auto text = mrsim::format_report(report);
    *out = new mrsim_report{std::move(report), std::move(text)};
  });
}

const char *mrsim_report_text(const mrsim_report *report) { return report ? report->text.c_str() : ""; }

mrsim_status mrsim_report_verdicts(const mrsim_report *report, int *degenerate, int *distortion_ordered,
                                   int *auc_ordered)
{
  return guard([&] {
    need(report, "report");
    if (degenerate) { *degenerate = report->value.degenerate; }
    if (distortion_ordered) { *distortion_ordered = report->value.distortion_ordered; }
    if (auc_ordered) { *auc_ordered = report->value.auc_ordered; }
  });
}

void mrsim_report_destroy(mrsim_report *report) { delete report; }

} // extern "C"
