#include "ndirac/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <system_error>

namespace ndirac {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::vector<double> split_numbers(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

const char* initial_name(InitialKind k) { return k == InitialKind::gaussian_bump ? "gaussian_bump" : "random"; }

template <class T>
void put_le(std::string& buf, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  buf.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(const char* p) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr std::uint32_t kFieldVersion = 1;
constexpr std::size_t kHeaderBytes = 32;

json check_json(const CheckEntry& c) {
  return json{{"name", c.name},          {"pass", c.pass},       {"margin", c.margin},
              {"tolerance", c.tolerance}, {"samples", c.samples}, {"detail", c.detail}};
}

json condition_json(const ConditionResult& c) {
  return json{{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}, {"value", c.value}, {"detail", c.detail}};
}

}  // namespace

RunConfig::RunConfig() {
  solver.inner.starts = 2;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  return {
      {"grid.n", std::to_string(n)},
      {"grid.L", fmt(L)},
      {"model.a", fmt(a)},
      {"model.p", fmt(p)},
      {"model.V", V},
      {"model.K", K},
      {"solver.tol_outer", fmt(solver.tol_outer)},
      {"solver.max_outer", std::to_string(solver.max_outer)},
      {"solver.step0", fmt(solver.step0)},
      {"solver.armijo_c", fmt(solver.armijo_c)},
      {"solver.starts", std::to_string(solver.starts)},
      {"solver.initial", initial_name(solver.initial)},
      {"solver.sigma", fmt(solver.sigma)},
      {"solver.tol_inner", fmt(solver.inner.tol)},
      {"solver.unique_tol", fmt(solver.inner.unique_tol)},
      {"solver.inner_starts", std::to_string(solver.inner.starts)},
      {"solver.max_inner", std::to_string(solver.inner.max_iterations)},
      {"seed", std::to_string(seed)},
      {"output.dir", output_dir},
  };
}

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty()) throw ConfigError(key + ": empty value");
    if (seen.count(key)) throw ConfigError(key + ": given twice (lines " + std::to_string(seen[key]) + " and " +
                                           std::to_string(line_no) + ")");
    seen[key] = line_no;

    if (key == "grid.n") {
      const long long v = to_integer(key, val);
      require(v >= 8 && v % 2 == 0 && v <= 1024, "grid.n must be even and in [8, 1024]");
      cfg.n = static_cast<int>(v);
    } else if (key == "grid.L") {
      cfg.L = to_double(key, val);
      require(cfg.L > 0.0, "grid.L must be positive");
    } else if (key == "model.a") {
      cfg.a = to_double(key, val);
      require(cfg.a > 0.0, "model.a must be positive");
    } else if (key == "model.p") {
      cfg.p = to_double(key, val);
      require(cfg.p >= 2.0, "model.p must be at least 2");
    } else if (key == "model.V") {
      cfg.V = val;
    } else if (key == "model.K") {
      cfg.K = val;
    } else if (key == "solver.tol_outer") {
      cfg.solver.tol_outer = to_double(key, val);
      require(cfg.solver.tol_outer > 0.0, "solver.tol_outer must be positive");
    } else if (key == "solver.max_outer") {
      const long long v = to_integer(key, val);
      require(v >= 1 && v <= 1000000, "solver.max_outer must be in [1, 1e6]");
      cfg.solver.max_outer = static_cast<int>(v);
    } else if (key == "solver.step0") {
      cfg.solver.step0 = to_double(key, val);
      require(cfg.solver.step0 > 0.0, "solver.step0 must be positive");
    } else if (key == "solver.armijo_c") {
      cfg.solver.armijo_c = to_double(key, val);
      require(cfg.solver.armijo_c > 0.0 && cfg.solver.armijo_c < 0.5, "solver.armijo_c must be in (0, 0.5)");
      cfg.solver.inner.armijo_c = cfg.solver.armijo_c;
    } else if (key == "solver.starts") {
      const long long v = to_integer(key, val);
      require(v >= 1 && v <= 64, "solver.starts must be in [1, 64]");
      cfg.solver.starts = static_cast<int>(v);
    } else if (key == "solver.initial") {
      if (val == "gaussian_bump") cfg.solver.initial = InitialKind::gaussian_bump;
      else if (val == "random") cfg.solver.initial = InitialKind::random;
      else throw ConfigError("solver.initial must be gaussian_bump or random");
    } else if (key == "solver.sigma") {
      cfg.solver.sigma = to_double(key, val);
      require(cfg.solver.sigma > 0.0, "solver.sigma must be positive");
    } else if (key == "solver.tol_inner") {
      cfg.solver.inner.tol = to_double(key, val);
      require(cfg.solver.inner.tol > 0.0, "solver.tol_inner must be positive");
    } else if (key == "solver.unique_tol") {
      cfg.solver.inner.unique_tol = to_double(key, val);
      require(cfg.solver.inner.unique_tol > 0.0, "solver.unique_tol must be positive");
    } else if (key == "solver.inner_starts") {
      const long long v = to_integer(key, val);
      require(v >= 1 && v <= 64, "solver.inner_starts must be in [1, 64]");
      cfg.solver.inner.starts = static_cast<int>(v);
    } else if (key == "solver.max_inner") {
      const long long v = to_integer(key, val);
      require(v >= 1 && v <= 10000000, "solver.max_inner must be in [1, 1e7]");
      cfg.solver.inner.max_iterations = static_cast<int>(v);
    } else if (key == "seed") {
      const long long v = to_integer(key, val);
      require(v >= 0, "seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "output.dir") {
      cfg.output_dir = val;
    } else {
      throw ConfigError("unknown key '" + key + "' on line " + std::to_string(line_no));
    }
  }
  cfg.solver.seed = cfg.seed;
  cfg.solver.inner.seed = cfg.seed;
  // fail early on bad profile strings
  const Grid grid(cfg.n, cfg.L);
  parse_profile(cfg.V, grid, cfg.base_dir);
  parse_profile(cfg.K, grid, cfg.base_dir);
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config " + path.string());
  return parse_config_text(buf.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

Profile parse_profile(const std::string& spec, const Grid& grid, const fs::path& base_dir) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("profile '" + spec + "': expected kind:parameters");
  const std::string kind = trim(spec.substr(0, colon));
  const std::string args = trim(spec.substr(colon + 1));
  if (kind == "table") {
    fs::path p = args;
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) throw IoError("cannot open profile table " + p.string());
    std::vector<double> values;
    values.reserve(grid.points());
    double x;
    while (in >> x) values.push_back(x);
    if (!in.eof()) throw ConfigError("profile table " + p.string() + ": non-numeric entry");
    if (values.size() != grid.points())
      throw ConfigError("profile table " + p.string() + ": expected " + std::to_string(grid.points()) + " values, got " +
                        std::to_string(values.size()));
    return Profile::from_table(std::move(values));
  }
  const std::vector<double> v = split_numbers("profile '" + spec + "'", args);
  if (kind == "constant") {
    require(v.size() == 1, "constant profile takes one value");
    return Profile::constant(v[0]);
  }
  if (kind == "rational") {
    require(v.size() == 2, "rational profile takes c,gamma");
    require(v[1] > 0.0, "rational profile: gamma must be positive");
    return Profile::rational_decay(v[0], v[1]);
  }
  if (kind == "exponential") {
    require(v.size() == 2, "exponential profile takes c,sigma");
    require(v[1] > 0.0, "exponential profile: sigma must be positive");
    return Profile::exponential(v[0], v[1]);
  }
  throw ConfigError("unknown profile kind '" + kind + "'");
}

ProblemModel build_model(const RunConfig& cfg) {
  const Grid grid(cfg.n, cfg.L);
  return ProblemModel(grid, cfg.a, parse_profile(cfg.V, grid, cfg.base_dir), parse_profile(cfg.K, grid, cfg.base_dir),
                      Nonlinearity::power(cfg.p));
}

void write_atomic(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

void write_field(const fs::path& path, const SpinorField& u, double a) {
  std::string buf;
  buf.reserve(kHeaderBytes + u.data().size() * 16);
  buf.append("NDRC", 4);
  put_le<std::uint32_t>(buf, kFieldVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(u.grid().n()));
  put_le<double>(buf, u.grid().half_length());
  put_le<double>(buf, a);
  put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(u.repr()));
  buf.append(3, '\0');
  for (const Complex& z : u.data()) {
    put_le<double>(buf, z.real());
    put_le<double>(buf, z.imag());
  }
  write_atomic(path, buf);
}

StoredField read_field(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open field " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read field " + path.string());
  if (buf.size() < kHeaderBytes || buf.compare(0, 4, "NDRC") != 0) throw IoError(path.string() + ": not a field file");
  const char* p = buf.data();
  const auto version = get_le<std::uint32_t>(p + 4);
  if (version != kFieldVersion) throw IoError(path.string() + ": unsupported version " + std::to_string(version));
  const auto n = get_le<std::uint32_t>(p + 8);
  const double L = get_le<double>(p + 12);
  const double a = get_le<double>(p + 20);
  const auto repr = get_le<std::uint8_t>(p + 28);
  if (n < 8 || n % 2 != 0 || n > 1024 || !(L > 0.0) || repr > 1) throw IoError(path.string() + ": bad header");
  const Grid grid(static_cast<int>(n), L);
  const std::size_t count = 4 * grid.points();
  if (buf.size() != kHeaderBytes + 16 * count)
    throw IoError(path.string() + ": expected " + std::to_string(kHeaderBytes + 16 * count) + " bytes, found " +
                  std::to_string(buf.size()));
  std::vector<Complex> data(count);
  const char* q = p + kHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, q += 16) data[i] = Complex(get_le<double>(q), get_le<double>(q + 8));
  return {SpinorField(grid, static_cast<Repr>(repr), std::move(data)), a};
}

std::string summary_json(const GroundStateResult& r, const RunConfig& cfg) {
  json echo = json::object();
  for (const auto& [k, v] : cfg.echo()) echo[k] = v;
  const json j = {{"c", r.c},
                  {"residual_self", r.residual.r_self},
                  {"residual_minus", r.residual.r_minus},
                  {"residual_full", r.residual_full},
                  {"iterations", r.iterations},
                  {"t_check", r.t_check},
                  {"converged", r.converged},
                  {"config_echo", echo}};
  return j.dump(2) + "\n";
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "iter,m_value,residual,step,inner_iters\n";
  for (const auto& t : trace) out << t.iter << ',' << t.m_value << ',' << t.residual << ',' << t.step << ',' << t.inner_iters << '\n';
  return out.str();
}

std::string profile_csv(const SpinorField& u, int bins) {
  const SpinorField phys = to_physical(u);
  const Grid& g = phys.grid();
  const std::vector<double> mod = pointwise_modulus(phys);
  const double rmax = std::sqrt(3.0) * g.half_length();
  const double width = bins > 0 ? rmax / bins : g.dx();
  const auto nb = bins > 0 ? static_cast<std::size_t>(bins) : static_cast<std::size_t>(std::ceil(rmax / width)) + 1;
  std::vector<double> sum(nb, 0.0), mx(nb, 0.0);
  std::vector<std::size_t> cnt(nb, 0);
  for (std::size_t i = 0; i < mod.size(); ++i) {
    const auto b = std::min(nb - 1, static_cast<std::size_t>(g.radius(i) / width));
    sum[b] += mod[i];
    mx[b] = std::max(mx[b], mod[i]);
    ++cnt[b];
  }
  std::ostringstream out;
  out << std::setprecision(12);
  out << "r,mean_abs_u,max_abs_u\n";
  for (std::size_t b = 0; b < nb; ++b)
    if (cnt[b] > 0) out << (b + 0.5) * width << ',' << sum[b] / cnt[b] << ',' << mx[b] << '\n';
  return out.str();
}

std::string report_json(const DiagnosticsReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  const VkReport& vk = r.vk_report;
  const json j = {
      {"all_pass", r.all_pass()},
      {"environment",
       {{"grid", {{"n", r.grid.n()}, {"L", r.grid.half_length()}}},
        {"model", r.model_description},
        {"seed", r.seed},
        {"rng", r.rng}}},
      {"checks", checks},
      {"f_conditions",
       {{"f1", condition_json(r.f_report.f1)},
        {"f2", condition_json(r.f_report.f2)},
        {"f3", condition_json(r.f_report.f3)},
        {"f4", condition_json(r.f_report.f4)},
        {"remark1", condition_json(r.f_report.remark1)},
        {"strictly_increasing", r.f_report.strictly_increasing},
        {"samples", r.f_report.samples}}},
      {"vk",
       {{"vk0_pass", vk.vk0_pass},
        {"min_V", vk.min_V},
        {"max_V", vk.max_V},
        {"min_K", vk.min_K},
        {"max_K", vk.max_K},
        {"a", vk.mass},
        {"q", vk.q},
        {"vk2_sup_ratio", vk.vk2_sup_ratio},
        {"radii", vk.radii},
        {"vk3_tail_sup", vk.vk3_tail_sup},
        {"vk3_decaying", vk.vk3_decaying},
        {"vk1_shell_integral", vk.vk1_shell_integral},
        {"vk1_tail_mass", vk.vk1_tail_mass},
        {"vk1_decaying", vk.vk1_decaying}}},
      {"mountain_pass",
       {{"embedding_constant", r.embedding_constant},
        {"rho", r.mountain_pass.rho},
        {"alpha", r.mountain_pass.alpha},
        {"C", r.mountain_pass.C},
        {"A_eps", r.mountain_pass.A_eps},
        {"eps", r.mountain_pass.eps}}},
      {"wall_time", r.wall_time}};
  return j.dump(2) + "\n";
}

void write_solve_outputs(const fs::path& dir, const GroundStateResult& result, const RunConfig& cfg) {
  write_field(dir / "field.bin", result.u_star, cfg.a);
  write_atomic(dir / "trace.csv", trace_csv(result.trace));
  write_atomic(dir / "profile.csv", profile_csv(result.u_star));
  write_atomic(dir / "summary.json", summary_json(result, cfg));
}

}  // namespace ndirac
