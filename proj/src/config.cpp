#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "rift/pipeline.hpp"

namespace rift {

void RiftConfig::validate() const {
  filter.validate();
  pc.validate();
  detect.validate();
  if (patch_size < 6 || patch_size % 6 != 0) {
    throw std::invalid_argument("patch_size must be a positive multiple of 6");
  }
  if (detect.border_margin < patch_size / 2) {
    throw std::invalid_argument("detect.border_margin must be at least patch_size / 2");
  }
  if (!(orientation_radius > 0.0)) throw std::invalid_argument("orientation_radius must be > 0");
  if (!(match.threshold > 0.0)) throw std::invalid_argument("match.threshold must be > 0");
  if (match.iterations < 1) throw std::invalid_argument("match.iterations must be >= 1");
  if (min_inliers < 3) throw std::invalid_argument("min_inliers must be >= 3");
}

namespace {

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const RiftConfig&)> get;
  std::function<void(RiftConfig&, const std::string&)> set;
};

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("not an integer");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false");
}

template <typename Member>
Field real(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RiftConfig& c) { return format_double(member(c)); },
          [member](RiftConfig& c, const std::string& v) { member(c) = parse_double(v); }};
}

template <typename Int, typename Member>
Field integer(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RiftConfig& c) {
            return std::to_string(member(c));
          },
          [member](RiftConfig& c, const std::string& v) { member(c) = parse_int<Int>(v); }};
}

template <typename Member>
Field boolean(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RiftConfig& c) {
            return std::string(member(c) ? "true" : "false");
          },
          [member](RiftConfig& c, const std::string& v) { member(c) = parse_bool(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      integer<int>("filter", "n_scales", [](auto& c) -> auto& { return c.filter.n_scales; }),
      integer<int>("filter", "n_orientations",
                   [](auto& c) -> auto& { return c.filter.n_orientations; }),
      real("filter", "min_wavelength", [](auto& c) -> auto& { return c.filter.min_wavelength; }),
      real("filter", "scale_mult", [](auto& c) -> auto& { return c.filter.scale_mult; }),
      real("filter", "sigma_on_f", [](auto& c) -> auto& { return c.filter.sigma_on_f; }),
      real("filter", "angular_sigma_ratio",
           [](auto& c) -> auto& { return c.filter.angular_sigma_ratio; }),
      real("filter", "lowpass_cutoff", [](auto& c) -> auto& { return c.filter.lowpass_cutoff; }),
      integer<int>("filter", "lowpass_order",
                   [](auto& c) -> auto& { return c.filter.lowpass_order; }),
      real("pc", "noise_k", [](auto& c) -> auto& { return c.pc.noise_k; }),
      real("pc", "epsilon", [](auto& c) -> auto& { return c.pc.epsilon; }),
      real("pc", "weight_cutoff", [](auto& c) -> auto& { return c.pc.weight_cutoff; }),
      real("pc", "weight_gain", [](auto& c) -> auto& { return c.pc.weight_gain; }),
      integer<int>("detect", "nms_radius", [](auto& c) -> auto& { return c.detect.nms_radius; }),
      integer<int>("detect", "max_corners", [](auto& c) -> auto& { return c.detect.max_corners; }),
      integer<int>("detect", "max_edges", [](auto& c) -> auto& { return c.detect.max_edges; }),
      real("detect", "fast_threshold", [](auto& c) -> auto& { return c.detect.fast_threshold; }),
      integer<int>("detect", "border_margin",
                   [](auto& c) -> auto& { return c.detect.border_margin; }),
      real("detect", "corner_percentile",
           [](auto& c) -> auto& { return c.detect.corner_percentile; }),
      integer<int>("describe", "patch_size", [](auto& c) -> auto& { return c.patch_size; }),
      real("describe", "orientation_radius",
           [](auto& c) -> auto& { return c.orientation_radius; }),
      real("match", "threshold", [](auto& c) -> auto& { return c.match.threshold; }),
      integer<int>("match", "iterations", [](auto& c) -> auto& { return c.match.iterations; }),
      integer<std::uint64_t>("match", "seed",
                             [](auto& c) -> auto& { return c.match.seed; }),
      integer<int>("match", "refinement_rounds",
                   [](auto& c) -> auto& { return c.match.refinement_rounds; }),
      boolean("match", "mutual", [](auto& c) -> auto& { return c.mutual_nn; }),
      integer<int>("match", "min_inliers", [](auto& c) -> auto& { return c.min_inliers; }),
  };
  return table;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string to_config_text(const RiftConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) os << '\n';
      section = f.section;
      os << '[' << section << "]\n";
    }
    os << f.key << " = " << f.get(cfg) << '\n';
  }
  return os.str();
}

RiftConfig parse_config_text(std::string_view text) {
  RiftConfig cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    auto where = [&] { return "config line " + std::to_string(line_no) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
      return f.section == section && f.key == key;
    });
    if (it == table.end()) throw ConfigError(where() + "unknown key '" + section + "." + key + "'");
    try {
      it->set(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(where() + "bad value '" + value + "' for " + section + "." + key + " (" +
                        e.what() + ")");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

RiftConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace rift
