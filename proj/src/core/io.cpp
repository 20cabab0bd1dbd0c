#include "io.hpp"

#include "error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace mrsim {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void io_fail(fs::path const &path, std::string const &what)
{
  fail(ErrorCode::Io, path.string() + ": " + what);
}

std::ifstream open_in(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { io_fail(path, "cannot open for reading"); }
  return in;
}

std::ofstream open_out(fs::path const &path)
{
  std::error_code ec;
  if (path.has_parent_path()) { fs::create_directories(path.parent_path(), ec); }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) { io_fail(path, "cannot open for writing"); }
  return out;
}

void close_checked(std::ofstream &out, fs::path const &path)
{
  out.close();
  if (!out) { io_fail(path, "write failed"); }
}

ordered_json read_json(fs::path const &path)
{
  auto in = open_in(path);
  try {
    return ordered_json::parse(in);
  } catch (nlohmann::json::exception const &e) {
    io_fail(path, std::string("invalid JSON: ") + e.what());
  }
}

void write_json(ordered_json const &doc, fs::path const &path)
{
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  close_checked(out, path);
}

std::uint32_t to_le(std::uint32_t v)
{
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

void skip_pgm_space(std::istream &in)
{
  for (;;) {
    int const c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_pgm_int(std::istream &in, fs::path const &path)
{
  skip_pgm_space(in);
  int v = 0;
  if (!(in >> v)) { io_fail(path, "malformed PGM header"); }
  return v;
}

ordered_json config_json(ScannerConfig const &c)
{
  return {{"scheme", std::string(to_string(c.scheme))},
          {"tr_ms", c.tr_ms},
          {"nex", c.nex},
          {"matrix_pe", c.matrix_pe},
          {"matrix_fe", c.matrix_fe},
          {"radial_spokes", c.radial_spokes},
          {"spoke_ordering", c.spoke_ordering == SpokeOrdering::GoldenAngle ? "golden" : "sequential"},
          {"spiral_interleaves", c.spiral_interleaves},
          {"spiral_turns", c.spiral_turns},
          {"fov_mm", c.fov_mm}};
}

ScannerConfig config_from(ordered_json const &j)
{
  ScannerConfig c;
  auto const scheme = parse_scheme(j.at("scheme").get<std::string>());
  if (!scheme) { fail(ErrorCode::InvalidArgument, "unknown scheme in config"); }
  c.scheme = *scheme;
  c.tr_ms = j.at("tr_ms").get<double>();
  c.nex = j.at("nex").get<int>();
  c.matrix_pe = j.at("matrix_pe").get<int>();
  c.matrix_fe = j.at("matrix_fe").get<int>();
  c.radial_spokes = j.at("radial_spokes").get<int>();
  c.spoke_ordering =
    j.at("spoke_ordering").get<std::string>() == "golden" ? SpokeOrdering::GoldenAngle : SpokeOrdering::Sequential;
  c.spiral_interleaves = j.at("spiral_interleaves").get<int>();
  c.spiral_turns = j.at("spiral_turns").get<double>();
  c.fov_mm = j.at("fov_mm").get<double>();
  return c;
}

ordered_json severity_json(SeverityStats const &s)
{
  return {{"rms_disp_mm", s.rms_displacement_mm}, {"rms_rot_deg", s.rms_rotation_deg}};
}

SeverityStats severity_from(ordered_json const &j)
{
  return {j.at("rms_disp_mm").get<double>(), j.at("rms_rot_deg").get<double>()};
}

ordered_json metrics_json(MetricsReport const &m)
{
  return {{"rmse", m.rmse}, {"nrmse", m.nrmse}, {"hf_ratio", m.highfreq_energy_ratio}, {"score", m.artifact_score}};
}

MetricsReport metrics_from(ordered_json const &j)
{
  return {j.at("rmse").get<double>(), j.at("nrmse").get<double>(), j.at("hf_ratio").get<double>(),
          j.at("score").get<double>()};
}

std::vector<std::string> split_csv(std::string const &line)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  return out;
}

} // namespace

fs::path sidecar_path(fs::path const &raw_path)
{
  fs::path p = raw_path;
  p.replace_extension(".json");
  return p;
}

PgmData read_pgm(fs::path const &path)
{
  auto in = open_in(path);
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') { io_fail(path, "not a binary PGM (P5)"); }
  PgmData pgm;
  pgm.width = read_pgm_int(in, path);
  pgm.height = read_pgm_int(in, path);
  pgm.maxval = read_pgm_int(in, path);
  if (pgm.width <= 0 || pgm.height <= 0 || pgm.maxval <= 0 || pgm.maxval > 65535) {
    io_fail(path, "invalid PGM dimensions or maxval");
  }
  in.get(); // single whitespace before the raster
  std::size_t const n = static_cast<std::size_t>(pgm.width) * pgm.height;
  std::size_t const bytes = pgm.maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(n * bytes);
  in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) { io_fail(path, "truncated PGM raster"); }
  pgm.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pgm.samples[i] = bytes == 1 ? raw[i] : static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    if (pgm.samples[i] > pgm.maxval) { io_fail(path, "PGM sample exceeds maxval"); }
  }
  return pgm;
}

void write_pgm(fs::path const &path, int width, int height, int maxval, std::vector<std::uint16_t> const &samples)
{
  if (maxval < 1 || maxval > 65535) { fail(ErrorCode::InvalidArgument, "PGM maxval must be in [1, 65535]"); }
  if (samples.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::InvalidArgument, "PGM sample count does not match its dimensions");
  }
  auto out = open_out(path);
  out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(samples.size() * 2);
  for (auto s : samples) {
    if (maxval > 255) { raw.push_back(static_cast<unsigned char>(s >> 8)); }
    raw.push_back(static_cast<unsigned char>(s & 0xff));
  }
  out.write(reinterpret_cast<char const *>(raw.data()), static_cast<std::streamsize>(raw.size()));
  close_checked(out, path);
}

void write_error_map(ErrorMap const &map, fs::path const &path)
{
  write_pgm(path, map.width, map.height, 255, std::vector<std::uint16_t>(map.values.begin(), map.values.end()));
}

ErrorMap read_error_map(fs::path const &path)
{
  auto const pgm = read_pgm(path);
  if (pgm.maxval != 255) { io_fail(path, "error map must be an 8-bit PGM"); }
  return {pgm.width, pgm.height, std::vector<std::uint8_t>(pgm.samples.begin(), pgm.samples.end())};
}

ImageSlice load_image(fs::path const &path, std::vector<std::string> *warnings)
{
  ImageSlice img;
  auto const sidecar = sidecar_path(path);
  char head[2] = {};
  {
    auto in = open_in(path);
    in.read(head, 2);
  }
  if (head[0] == 'P' && head[1] == '5') {
    auto const pgm = read_pgm(path);
    img = ImageSlice(pgm.width, pgm.height);
    for (std::size_t i = 0; i < pgm.samples.size(); ++i) {
      img.pixels[i] = static_cast<double>(pgm.samples[i]) / pgm.maxval;
    }
    if (fs::exists(sidecar)) {
      img.pixel_spacing_mm = read_json(sidecar).value("pixel_spacing_mm", 1.0);
    } else if (warnings) {
      warnings->push_back(path.string() + ": no sidecar, assuming 1 mm pixel spacing");
    }
  } else {
    if (!fs::exists(sidecar)) { io_fail(path, "unknown image format (not P5 PGM and no JSON sidecar)"); }
    auto const meta = read_json(sidecar);
    if (meta.value("dtype", std::string("float32")) != "float32" ||
        meta.value("byte_order", std::string("little-endian")) != "little-endian") {
      io_fail(sidecar, "only little-endian float32 raw images are supported");
    }
    img = ImageSlice(meta.at("width").get<int>(), meta.at("height").get<int>(),
                     meta.value("pixel_spacing_mm", 1.0));
    auto in = open_in(path);
    std::vector<std::uint32_t> raw(img.size());
    in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
    if (static_cast<std::size_t>(in.gcount()) != raw.size() * 4) { io_fail(path, "raw file shorter than sidecar says"); }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      img.pixels[i] = std::bit_cast<float>(to_le(raw[i]));
    }
  }
  try {
    validate(img);
  } catch (Error const &e) {
    io_fail(path, e.what());
  }
  return img;
}

void save_image_raw(ImageSlice const &image, fs::path const &path)
{
  std::vector<std::uint32_t> raw(image.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = to_le(std::bit_cast<std::uint32_t>(static_cast<float>(image.pixels[i])));
  }
  auto out = open_out(path);
  out.write(reinterpret_cast<char const *>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  close_checked(out, path);
  ordered_json meta = {{"width", image.width},
                       {"height", image.height},
                       {"pixel_spacing_mm", image.pixel_spacing_mm},
                       {"dtype", "float32"},
                       {"byte_order", "little-endian"}};
  write_json(meta, sidecar_path(path));
}

ImageSlice resize_bilinear(ImageSlice const &image, int width, int height)
{
  if (width < 8 || height < 8 || width % 2 || height % 2) {
    fail(ErrorCode::InvalidArgument, "resize target must be even and >= 8 in both dimensions");
  }
  if (width == image.width && height == image.height) { return image; }
  ImageSlice out(width, height, image.pixel_spacing_mm * image.width / width);
  double const sx = static_cast<double>(image.width) / width;
  double const sy = static_cast<double>(image.height) / height;
  auto clamp_at = [&](int x, int y) {
    return image.at(std::clamp(x, 0, image.width - 1), std::clamp(y, 0, image.height - 1));
  };
  for (int y = 0; y < height; ++y) {
    double const fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height - 1.0);
    int const y0 = static_cast<int>(std::floor(fy));
    double const ay = fy - y0;
    for (int x = 0; x < width; ++x) {
      double const fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width - 1.0);
      int const x0 = static_cast<int>(std::floor(fx));
      double const ax = fx - x0;
      out.at(x, y) = (1 - ay) * ((1 - ax) * clamp_at(x0, y0) + ax * clamp_at(x0 + 1, y0)) +
                     ay * ((1 - ax) * clamp_at(x0, y0 + 1) + ax * clamp_at(x0 + 1, y0 + 1));
    }
  }
  return out;
}

ImageSlice conform_to_config(ImageSlice const &image, ScannerConfig const &config)
{
  auto out = resize_bilinear(image, config.matrix_fe, config.matrix_pe);
  if (config.fov_mm > 0.0) { out.pixel_spacing_mm = config.fov_mm / config.matrix_fe; }
  return out;
}

std::string metrics_csv_row(SimulationRecord const &r)
{
  std::ostringstream os;
  os << std::setprecision(17) << r.id << ',' << to_string(r.config.scheme) << ',' << r.seed << ','
     << r.severity.rms_displacement_mm << ',' << r.severity.rms_rotation_deg << ',' << r.metrics.rmse << ','
     << r.metrics.nrmse << ',' << r.metrics.highfreq_energy_ratio << ',' << r.metrics.artifact_score;
  return os.str();
}

void write_record(SimulationRecord const &record, fs::path const &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) { io_fail(dir, "cannot create directory: " + ec.message()); }
  save_image_raw(record.clean, dir / "clean.raw");
  save_image_raw(record.corrupted, dir / "corrupted.raw");
  write_error_map(record.error_map, dir / "error_map.pgm");
  write_trajectory_csv(record.trajectory, (dir / "trajectory.csv").string());
  {
    auto out = open_out(dir / "metrics.csv");
    out << kMetricsCsvHeader << '\n' << metrics_csv_row(record) << '\n';
    close_checked(out, dir / "metrics.csv");
  }
  ordered_json doc = {{"id", record.id},
                      {"seed", record.seed},
                      {"config", config_json(record.config)},
                      {"severity", severity_json(record.severity)},
                      {"metrics", metrics_json(record.metrics)}};
  write_json(doc, dir / "record.json");
}

SimulationRecord read_record(fs::path const &dir)
{
  auto const doc = read_json(dir / "record.json");
  SimulationRecord r;
  try {
    r.id = doc.at("id").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.config = config_from(doc.at("config"));
    r.severity = severity_from(doc.at("severity"));
  } catch (nlohmann::json::exception const &e) {
    io_fail(dir / "record.json", e.what());
  }
  r.clean = load_image(dir / "clean.raw");
  r.corrupted = load_image(dir / "corrupted.raw");
  r.error_map = read_error_map(dir / "error_map.pgm");
  r.trajectory = read_trajectory_csv((dir / "trajectory.csv").string());

  auto in = open_in(dir / "metrics.csv");
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  auto const cells = split_csv(row);
  if (header != kMetricsCsvHeader || cells.size() != 9) { io_fail(dir / "metrics.csv", "malformed metrics CSV"); }
  try {
    r.metrics = {std::stod(cells[5]), std::stod(cells[6]), std::stod(cells[7]), std::stod(cells[8])};
  } catch (std::exception const &) {
    io_fail(dir / "metrics.csv", "non-numeric metric");
  }
  return r;
}

std::vector<std::string> verify_record(SimulationRecord const &record, double tolerance)
{
  std::vector<std::string> issues;
  auto const m = compute_metrics(record.clean, record.corrupted);
  auto check = [&](char const *name, double stored, double fresh) {
    if (!(std::abs(stored - fresh) <= tolerance * std::max(1.0, std::abs(fresh)))) {
      std::ostringstream os;
      os << std::setprecision(17) << name << ": stored " << stored << ", recomputed " << fresh;
      issues.push_back(os.str());
    }
  };
  check("rmse", record.metrics.rmse, m.rmse);
  check("nrmse", record.metrics.nrmse, m.nrmse);
  check("hf_ratio", record.metrics.highfreq_energy_ratio, m.highfreq_energy_ratio);
  check("score", record.metrics.artifact_score, m.artifact_score);
  if (!(abs_error_map(record.clean, record.corrupted) == record.error_map)) {
    issues.push_back("error map does not match the stored images");
  }
  auto const sev = severity_rms(record.trajectory);
  check("rms_disp_mm", record.severity.rms_displacement_mm, sev.rms_displacement_mm);
  check("rms_rot_deg", record.severity.rms_rotation_deg, sev.rms_rotation_deg);
  return issues;
}

void write_manifest(DatasetManifest const &manifest, fs::path const &path)
{
  std::set<std::string> ids;
  ordered_json entries = ordered_json::array();
  for (auto const &e : manifest.entries) {
    if (!ids.insert(e.id).second) { fail(ErrorCode::InvalidArgument, "duplicate manifest id: " + e.id); }
    if (e.label != "motion" && e.label != "clean") {
      fail(ErrorCode::InvalidArgument, "manifest label must be motion or clean: " + e.id);
    }
    entries.push_back({{"id", e.id},
                       {"label", e.label},
                       {"scheme", std::string(to_string(e.config.scheme))},
                       {"seed", e.seed},
                       {"image_index", e.image_index},
                       {"trial", e.trial},
                       {"source", e.source},
                       {"dir", e.dir},
                       {"severity", severity_json(e.severity)},
                       {"config", config_json(e.config)},
                       {"metrics", metrics_json(e.metrics)}});
  }
  ordered_json doc = {{"format_version", manifest.format_version},
                      {"master_seed", manifest.master_seed},
                      {"entries", std::move(entries)}};
  write_json(doc, path);
}

DatasetManifest read_manifest(fs::path const &path)
{
  auto const doc = read_json(path);
  DatasetManifest m;
  try {
    m.format_version = doc.at("format_version").get<std::string>();
    if (m.format_version != "1") { io_fail(path, "unsupported manifest version " + m.format_version); }
    m.master_seed = doc.at("master_seed").get<std::uint64_t>();
    std::set<std::string> ids;
    for (auto const &j : doc.at("entries")) {
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.label = j.at("label").get<std::string>();
      e.seed = j.at("seed").get<std::uint64_t>();
      e.image_index = j.at("image_index").get<int>();
      e.trial = j.at("trial").get<int>();
      e.source = j.at("source").get<std::string>();
      e.dir = j.at("dir").get<std::string>();
      e.severity = severity_from(j.at("severity"));
      e.config = config_from(j.at("config"));
      e.metrics = metrics_from(j.at("metrics"));
      if (!ids.insert(e.id).second) { io_fail(path, "duplicate id " + e.id); }
      m.entries.push_back(std::move(e));
    }
  } catch (nlohmann::json::exception const &e) {
    io_fail(path, e.what());
  }
  return m;
}

SimulationRecord regenerate(ManifestEntry const &entry, fs::path const &manifest_dir)
{
  fs::path src = entry.source;
  if (src.is_relative()) { src = manifest_dir / src; }
  auto const image = conform_to_config(load_image(src), entry.config);
  auto rec = corrupt_slice(image, entry.config, entry.severity, entry.seed);
  rec.id = entry.id;
  return rec;
}

std::string config_summary(ScannerConfig const &c)
{
  std::ostringstream os;
  os << to_string(c.scheme) << ' ' << c.matrix_fe << 'x' << c.matrix_pe << " tr_ms=" << c.tr_ms << " nex=" << c.nex
     << " shots=" << c.shots_per_excitation() * c.nex << " scan_time_s=" << scan_time_s(c);
  return os.str();
}

} // namespace mrsim
