#include <mrsim/mrsim.h>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct RuntimeError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Invalid arguments that reach the library are still usage errors; anything
// else (I/O, numerics) is a runtime failure.
void check(mrsim_status status)
{
  if (status == MRSIM_OK) { return; }
  std::string const msg = mrsim_last_error();
  if (status == MRSIM_ERR_INVALID_ARGUMENT || status == MRSIM_ERR_UNSUPPORTED) { throw UsageError(msg); }
  throw RuntimeError(msg);
}

template <typename T, void (*Destroy)(T *)>
struct Deleter
{
  void operator()(T *p) const { Destroy(p); }
};

using ImagePtr = std::unique_ptr<mrsim_image, Deleter<mrsim_image, mrsim_image_destroy>>;
using TrajectoryPtr = std::unique_ptr<mrsim_trajectory, Deleter<mrsim_trajectory, mrsim_trajectory_destroy>>;
using PlanPtr = std::unique_ptr<mrsim_plan, Deleter<mrsim_plan, mrsim_plan_destroy>>;
using RecordPtr = std::unique_ptr<mrsim_record, Deleter<mrsim_record, mrsim_record_destroy>>;
using ReportPtr = std::unique_ptr<mrsim_report, Deleter<mrsim_report, mrsim_report_destroy>>;

void print_warning(char const *message, void *) { std::fprintf(stderr, "warning: %s\n", message); }

std::uint64_t default_seed()
{
  char const *env = std::getenv("MRSIM_SEED");
  if (!env || !*env) { return 0; }
  char *end = nullptr;
  errno = 0;
  unsigned long long const v = std::strtoull(env, &end, 0);
  if (errno || *end || *env == '-') { throw UsageError(std::string("MRSIM_SEED is not an unsigned integer: ") + env); }
  return v;
}

struct ScannerFlags
{
  std::string scheme = "cartesian";
  double tr_ms = 400.0;
  int nex = 1;
  std::string matrix;
  int spokes = 0;
  bool golden = false;
  int interleaves = 0;
  double turns = 0.0;
  double fov_mm = 0.0;
  CLI::Option *spokes_opt = nullptr;
  CLI::Option *golden_opt = nullptr;
  CLI::Option *interleaves_opt = nullptr;
  CLI::Option *turns_opt = nullptr;

  void add(CLI::App &app, bool with_scheme, std::string const &matrix_help)
  {
    if (with_scheme) {
      app.add_option("--scheme", scheme, "Sampling scheme")
        ->check(CLI::IsMember({"cartesian", "radial", "spiral"}))
        ->capture_default_str();
    }
    app.add_option("--tr-ms", tr_ms, "Repetition time per shot (ms)")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--nex", nex, "Number of excitations (count)")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--matrix", matrix, matrix_help);
    spokes_opt = app.add_option("--spokes", spokes, "Radial spokes per excitation (count; default matrix_pe)")
                   ->check(CLI::PositiveNumber);
    golden_opt = app.add_flag("--golden-angle", golden, "Radial: golden-angle spoke ordering");
    interleaves_opt =
      app.add_option("--interleaves", interleaves, "Spiral interleaves (count; default matrix_pe)")
        ->check(CLI::PositiveNumber);
    turns_opt = app.add_option("--turns", turns, "Spiral turns per interleave (count; default pe / (2 interleaves))")
                  ->check(CLI::PositiveNumber);
    app.add_option("--fov-mm", fov_mm, "Field of view (mm); default: image size times pixel spacing")
      ->check(CLI::PositiveNumber);
  }

  // Scheme-specific flags are only accepted together with their scheme.
  void check_consistency(std::vector<std::string> const &schemes) const
  {
    auto has = [&](char const *s) {
      for (auto const &x : schemes) {
        if (x == s) { return true; }
      }
      return false;
    };
    if ((spokes_opt->count() || golden_opt->count()) && !has("radial")) {
      throw UsageError("--spokes and --golden-angle apply to the radial scheme only");
    }
    if ((interleaves_opt->count() || turns_opt->count()) && !has("spiral")) {
      throw UsageError("--interleaves and --turns apply to the spiral scheme only");
    }
  }

  std::optional<std::pair<int, int>> parsed_matrix() const
  {
    if (matrix.empty()) { return std::nullopt; }
    int w = 0;
    int h = 0;
    char x = 0;
    std::istringstream is(matrix);
    if (is >> w) {
      if (is >> x) {
        if (x != 'x' || !(is >> h)) { w = 0; }
      } else {
        h = w;
      }
    }
    if (w < 8 || h < 8 || w % 2 || h % 2 || !is.eof()) {
      throw UsageError("--matrix must be N or WxH with even values >= 8, got '" + matrix + "'");
    }
    return std::make_pair(w, h);
  }

  mrsim_scanner_config config(std::string const &scheme_name, int width, int height) const
  {
    mrsim_scanner_config c;
    mrsim_scanner_config_init(&c);
    check(mrsim_parse_scheme(scheme_name.c_str(), &c.scheme));
    c.tr_ms = tr_ms;
    c.nex = nex;
    c.matrix_fe = width;
    c.matrix_pe = height;
    c.radial_spokes = spokes;
    c.golden_angle = golden;
    c.spiral_interleaves = interleaves;
    c.spiral_turns = turns;
    c.fov_mm = fov_mm;
    check(mrsim_validate_config(&c));
    return c;
  }
};

std::vector<std::string> split_list(std::string const &text)
{
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item != "cartesian" && item != "radial" && item != "spiral") {
      throw UsageError("unknown scheme '" + item + "' (expected cartesian, radial or spiral)");
    }
    out.push_back(item);
  }
  if (out.empty()) { throw UsageError("--schemes is empty"); }
  return out;
}

void ensure_dir(fs::path const &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) { throw RuntimeError(dir.string() + ": cannot create directory: " + ec.message()); }
}

struct TrajectoryCmd
{
  std::size_t shots = 0;
  ScannerFlags scanner;
  double disp = 1.0;
  double rot = 0.6;
  bool in_plane = false;
  std::uint64_t seed = 0;
  std::string output;

  void add(CLI::App &app)
  {
    app.add_option("--shots", shots, "Number of TR shots (count); default from the scanner flags");
    scanner.add(app, true, "Matrix N or WxH (pixels) used to derive the shot count; default 256");
    app.add_option("--disp", disp, "Target RMS displacement (mm)")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_option("--rot", rot, "Target RMS rotation (deg)")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_flag("--in-plane", in_plane, "Only tx, ty and rz move");
    app.add_option("--seed", seed, "Seed (integer; default $MRSIM_SEED or 0)");
    app.add_option("-o,--output", output, "Output trajectory CSV (path)")->required();
  }

  int run()
  {
    scanner.check_consistency({scanner.scheme});
    if (shots == 0) {
      auto const m = scanner.parsed_matrix().value_or(std::make_pair(256, 256));
      auto const c = scanner.config(scanner.scheme, m.first, m.second);
      int per = 0;
      check(mrsim_shots_per_excitation(&c, &per));
      shots = static_cast<std::size_t>(per) * c.nex;
    }
    mrsim_trajectory *raw = nullptr;
    check(mrsim_trajectory_generate(shots, scanner.tr_ms, disp, rot, seed, in_plane, &raw));
    TrajectoryPtr traj(raw);
    fs::path const out(output);
    if (out.has_parent_path()) { ensure_dir(out.parent_path()); }
    check(mrsim_trajectory_write_csv(traj.get(), output.c_str()));
    double d = 0.0;
    double r = 0.0;
    check(mrsim_trajectory_severity(traj.get(), &d, &r));
    std::printf("rms_disp_mm=%.9g rms_rot_deg=%.9g\n", d, r);
    return kExitOk;
  }
};

struct SimulateCmd
{
  std::string input;
  std::string output;
  ScannerFlags scanner;
  double disp = 1.0;
  double rot = 0.6;
  std::uint64_t seed = 0;
  std::string id;
  bool emit_plan = false;

  void add(CLI::App &app)
  {
    app.add_option("-i,--input", input, "Input image: P5 PGM or raw float32 with .json sidecar (path)")->required();
    app.add_option("-o,--output", output, "Output record directory (path)")->required();
    scanner.add(app, true, "Resize the image to N or WxH (pixels) first; default: image size");
    app.add_option("--disp", disp, "Target RMS displacement (mm)")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_option("--rot", rot, "Target RMS rotation (deg)")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_option("--seed", seed, "Seed (integer; default $MRSIM_SEED or 0)");
    app.add_option("--id", id, "Record id (default: input stem)");
    app.add_flag("--emit-plan", emit_plan, "Also write the sampling plan as plan.csv");
  }

  int run()
  {
    scanner.check_consistency({scanner.scheme});
    mrsim_image *raw = nullptr;
    check(mrsim_image_load(input.c_str(), print_warning, nullptr, &raw));
    ImagePtr image(raw);
    int w = 0;
    int h = 0;
    check(mrsim_image_info(image.get(), &w, &h, nullptr));
    auto const m = scanner.parsed_matrix().value_or(std::make_pair(w, h));
    auto const cfg = scanner.config(scanner.scheme, m.first, m.second);
    check(mrsim_image_conform(image.get(), &cfg, &raw));
    ImagePtr conformed(raw);

    mrsim_record *rec_raw = nullptr;
    check(mrsim_corrupt_slice(conformed.get(), &cfg, disp, rot, seed, &rec_raw));
    RecordPtr rec(rec_raw);
    std::string const rid = id.empty() ? fs::path(input).stem().string() : id;
    check(mrsim_record_set_id(rec.get(), rid.c_str()));
    ensure_dir(output);
    check(mrsim_record_write(rec.get(), output.c_str()));
    if (emit_plan) {
      mrsim_plan *plan_raw = nullptr;
      check(mrsim_plan_create(&cfg, &plan_raw));
      PlanPtr plan(plan_raw);
      check(mrsim_plan_write_csv(plan.get(), (fs::path(output) / "plan.csv").string().c_str()));
    }
    mrsim_metrics met{};
    check(mrsim_record_metrics(rec.get(), &met));
    std::printf("id=%s scheme=%s rmse=%.9g nrmse=%.9g hf_ratio=%.9g score=%.9g\n", rid.c_str(),
                scanner.scheme.c_str(), met.rmse, met.nrmse, met.hf_ratio, met.artifact_score);
    return kExitOk;
  }
};

struct BatchCmd
{
  std::string input;
  std::string output;
  std::string schemes = "cartesian";
  ScannerFlags scanner;
  int trials = 1;
  int threads = 0;
  std::uint64_t seed = 0;

  void add(CLI::App &app)
  {
    app.add_option("-i,--input", input, "Directory of input images, .pgm or .raw (path)")->required();
    app.add_option("-o,--output", output, "Output dataset directory (path)")->required();
    app.add_option("--schemes", schemes, "Comma-separated schemes, e.g. cartesian,radial,spiral")->capture_default_str();
    scanner.add(app, false, "Matrix N or WxH (pixels); images are resized to it; default 256");
    app.add_option("--trials", trials, "Trials per image (count)")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (count; 0 = all cores)")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
    app.add_option("--seed", seed, "Master seed (integer; default $MRSIM_SEED or 0)");
  }

  int run()
  {
    auto const list = split_list(schemes);
    scanner.check_consistency(list);
    auto const m = scanner.parsed_matrix().value_or(std::make_pair(256, 256));
    mrsim_batch_options opt;
    mrsim_batch_options_init(&opt);
    opt.base = scanner.config(list.front(), m.first, m.second);
    for (auto const &s : list) {
      scanner.config(s, m.first, m.second);
    }
    opt.input_dir = input.c_str();
    opt.output_dir = output.c_str();
    opt.schemes = schemes.c_str();
    opt.trials = trials;
    opt.threads = threads;
    opt.master_seed = seed;
    opt.warn = print_warning;
    if (!fs::is_directory(input)) { throw RuntimeError(input + ": not a directory"); }
    ensure_dir(output);
    std::size_t n = 0;
    mrsim_status const st = mrsim_batch_run(&opt, &n);
    if (st == MRSIM_ERR_IO) { throw RuntimeError(mrsim_last_error()); }
    check(st);
    std::printf("entries=%zu manifest=%s\n", n, (fs::path(output) / "manifest.json").string().c_str());
    return kExitOk;
  }
};

struct CompareCmd
{
  std::vector<std::string> manifests;
  std::string output;
  int repetitions = 5;
  std::uint64_t seed = 0;

  void add(CLI::App &app)
  {
    app.add_option("-m,--manifest", manifests, "Batch manifest(s) (path); records of >= 2 schemes, paired")
      ->required();
    app.add_option("-o,--output", output, "Output directory for compare.csv and report.txt (path)")->required();
    app.add_option("--repetitions", repetitions, "Train/test repetitions (count)")->check(CLI::PositiveNumber)
      ->capture_default_str();
    app.add_option("--seed", seed, "Split/probe seed (integer; default $MRSIM_SEED or 0)");
  }

  int run()
  {
    ensure_dir(output);
    std::vector<char const *> paths;
    for (auto const &m : manifests) {
      paths.push_back(m.c_str());
    }
    auto const csv = (fs::path(output) / "compare.csv").string();
    mrsim_report *raw = nullptr;
    mrsim_status const st = mrsim_compare_run(paths.data(), paths.size(), repetitions, seed, csv.c_str(), &raw);
    if (st != MRSIM_OK) { throw RuntimeError(mrsim_last_error()); }
    ReportPtr report(raw);
    std::string const text = mrsim_report_text(report.get());
    std::fputs(text.c_str(), stdout);
    auto const txt = fs::path(output) / "report.txt";
    std::FILE *f = std::fopen(txt.string().c_str(), "w");
    if (!f || std::fputs(text.c_str(), f) < 0 || std::fclose(f) != 0) {
      throw RuntimeError(txt.string() + ": write failed");
    }
    return kExitOk;
  }
};

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Retrospective MRI motion-artifact simulator"};
  app.set_version_flag("--version", std::string(mrsim_version()));
  app.require_subcommand(1);

  TrajectoryCmd trajectory;
  SimulateCmd simulate;
  BatchCmd batch;
  CompareCmd compare;
  trajectory.add(*app.add_subcommand("trajectory", "Generate a random rigid motion trajectory CSV"));
  simulate.add(*app.add_subcommand("simulate", "Corrupt one slice and write its record"));
  batch.add(*app.add_subcommand("batch", "Generate a labelled motion/clean dataset with a manifest"));
  compare.add(*app.add_subcommand("compare", "Compare schemes across paired batch manifests"));

  try {
    std::uint64_t const seed = default_seed();
    trajectory.seed = simulate.seed = batch.seed = compare.seed = seed;
  } catch (UsageError const &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const &e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const &e) {
    return app.exit(e);
  } catch (CLI::CallForVersion const &e) {
    return app.exit(e);
  } catch (CLI::ParseError const &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("trajectory")) { return trajectory.run(); }
    if (app.got_subcommand("simulate")) { return simulate.run(); }
    if (app.got_subcommand("batch")) { return batch.run(); }
    return compare.run();
  } catch (UsageError const &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (std::exception const &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
