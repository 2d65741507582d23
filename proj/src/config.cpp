#include "dsnld/config.hpp"

#include <fstream>
#include <set>

#include "dsnld/errors.hpp"
#include "dsnld/io.hpp"

namespace dsnld {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown field '" + where + "." + key + "'");
}

double get_num(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing field '" + where + "." + key + "'");
  if (!obj.at(key).is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  return obj.at(key).get<double>();
}

double get_num(const json& obj, const std::string& where, const std::string& key, double dflt) {
  return obj.contains(key) ? get_num(obj, where, key) : dflt;
}

}  // namespace

Coefficient parse_coefficient(const json& j, const std::string& where) {
  require_keys(j, where,
               {"family", "value", "amplitude", "center", "width", "wavenumber", "phase",
                "steepness"});
  if (!j.contains("family")) throw ConfigError("missing field '" + where + ".family'");
  const std::string family = j.at("family").get<std::string>();
  if (family == "zero") return Coefficient::zero();
  if (family == "constant") return Coefficient::constant(get_num(j, where, "value"));
  if (family == "gaussian_bump")
    return Coefficient::gaussian_bump(get_num(j, where, "amplitude"),
                                      get_num(j, where, "center", 0.0),
                                      get_num(j, where, "width", 1.0));
  if (family == "scaled_sine")
    return Coefficient::scaled_sine(get_num(j, where, "amplitude"),
                                    get_num(j, where, "wavenumber", 1.0),
                                    get_num(j, where, "phase", 0.0));
  if (family == "sigmoid")
    return Coefficient::sigmoid(get_num(j, where, "amplitude"),
                                get_num(j, where, "steepness", 1.0),
                                get_num(j, where, "center", 0.0));
  throw ConfigError("unknown coefficient family '" + family + "' at " + where);
}

NonlinearitySpec parse_nonlinearity(const json& j) {
  require_keys(j, "nonlinearity", {"kind", "m", "u_max", "u_c", "slope", "samples", "file"});
  if (!j.contains("kind")) throw ConfigError("missing field 'nonlinearity.kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") return NonlinearitySpec::linear();
  if (kind == "power_law")
    return NonlinearitySpec::power_law(get_num(j, "nonlinearity", "m"),
                                       get_num(j, "nonlinearity", "u_max"));
  if (kind == "stefan")
    return NonlinearitySpec::stefan(get_num(j, "nonlinearity", "u_c"),
                                    get_num(j, "nonlinearity", "slope", 1.0),
                                    get_num(j, "nonlinearity", "u_max", 2.0));
  if (kind == "table") {
    std::vector<std::pair<double, double>> samples;
    if (j.contains("file")) {
      samples = load_table_csv(j.at("file").get<std::string>());
    } else if (j.contains("samples")) {
      for (const auto& row : j.at("samples"))
        samples.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    } else {
      throw ConfigError("table nonlinearity needs 'samples' or 'file'");
    }
    return NonlinearitySpec::from_table(std::move(samples),
                                        get_num(j, "nonlinearity", "u_max", 2.0));
  }
  throw ConfigError("unknown nonlinearity kind '" + kind + "'");
}

InitialLaw parse_initial_law(const json& j) {
  require_keys(j, "initial_law", {"kind", "mean", "sd", "a", "b", "m", "t_init", "samples"});
  if (!j.contains("kind")) throw ConfigError("missing field 'initial_law.kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian")
    return InitialLaw::gaussian_law(get_num(j, "initial_law", "mean", 0.0),
                                    get_num(j, "initial_law", "sd"));
  if (kind == "uniform")
    return InitialLaw::uniform_law(get_num(j, "initial_law", "a"), get_num(j, "initial_law", "b"));
  if (kind == "barenblatt")
    return InitialLaw::barenblatt_law(get_num(j, "initial_law", "m"),
                                      get_num(j, "initial_law", "t_init"));
  if (kind == "table") {
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : j.at("samples"))
      samples.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    return InitialLaw::table_law(std::move(samples));
  }
  throw ConfigError("unknown initial_law kind '" + kind + "'");
}

RunConfig parse_config(const json& doc) {
  require_keys(doc, "config",
               {"experiment", "seeds", "grid", "time", "nonlinearity", "kappa", "kappa_list",
                "noise", "initial_law", "particles", "realizations", "solver", "tolerances",
                "experiment_params", "output_dir", "threads"});

  RunConfig cfg;
  cfg.echo = doc;
  if (!doc.contains("experiment")) throw ConfigError("missing field 'experiment'");
  cfg.experiment = doc.at("experiment").get<std::string>();

  // seeds: all explicit, no defaulting
  if (!doc.contains("seeds")) throw ConfigError("missing field 'seeds'");
  const json& js = doc.at("seeds");
  require_keys(js, "seeds", {"env", "particles", "initial"});
  for (const char* key : {"env", "particles", "initial"})
    if (!js.contains(key)) throw ConfigError(std::string("missing seed 'seeds.") + key + "'");
  cfg.seeds.env = js.at("env").get<std::uint64_t>();
  cfg.seeds.particles = js.at("particles").get<std::uint64_t>();
  cfg.seeds.initial = js.at("initial").get<std::uint64_t>();

  if (doc.contains("grid")) {
    const json& jg = doc.at("grid");
    require_keys(jg, "grid", {"half_width", "n_points"});
    cfg.grid = GridSpec(get_num(jg, "grid", "half_width"),
                        static_cast<int>(get_num(jg, "grid", "n_points")));
  }

  if (!doc.contains("time")) throw ConfigError("missing field 'time'");
  const json& jt = doc.at("time");
  require_keys(jt, "time", {"t_end", "dt", "noise_dt", "snapshots"});
  cfg.t_end = get_num(jt, "time", "t_end");
  cfg.dt = get_num(jt, "time", "dt");
  if (jt.contains("noise_dt") && get_num(jt, "time", "noise_dt") != cfg.dt)
    throw ConfigError("mismatched time grids: 'time.noise_dt' differs from 'time.dt'");
  if (jt.contains("snapshots"))
    for (const auto& t : jt.at("snapshots")) cfg.snapshot_times.push_back(t.get<double>());

  if (doc.contains("nonlinearity")) cfg.spec = parse_nonlinearity(doc.at("nonlinearity"));
  if (doc.contains("kappa")) cfg.kappa = doc.at("kappa").get<double>();
  if (doc.contains("kappa_list"))
    for (const auto& k : doc.at("kappa_list")) cfg.kappa_list.push_back(k.get<double>());

  if (doc.contains("noise")) {
    const json& jn = doc.at("noise");
    require_keys(jn, "noise", {"e0", "drivers"});
    std::vector<Coefficient> coeffs;
    coeffs.push_back(jn.contains("e0") ? parse_coefficient(jn.at("e0"), "noise.e0")
                                       : Coefficient::zero());
    if (jn.contains("drivers")) {
      int i = 0;
      for (const auto& jc : jn.at("drivers"))
        coeffs.push_back(parse_coefficient(jc, "noise.drivers[" + std::to_string(i++) + "]"));
    }
    cfg.model = NoiseModel(std::move(coeffs));
  }

  if (doc.contains("initial_law")) cfg.x0 = parse_initial_law(doc.at("initial_law"));

  if (doc.contains("particles")) {
    const json& jp = doc.at("particles");
    require_keys(jp, "particles", {"count", "ess_floor_fraction", "bandwidth", "picard_sweeps"});
    cfg.n_particles = static_cast<int>(get_num(jp, "particles", "count", cfg.n_particles));
    cfg.ess_floor_fraction = get_num(jp, "particles", "ess_floor_fraction", 0.0);
    cfg.bandwidth = get_num(jp, "particles", "bandwidth", 0.0);
    cfg.picard_sweeps = static_cast<int>(get_num(jp, "particles", "picard_sweeps", 1));
  }

  if (doc.contains("realizations")) cfg.realizations = doc.at("realizations").get<int>();

  if (doc.contains("solver")) {
    const json& jv = doc.at("solver");
    require_keys(jv, "solver", {"cfl_safety", "min_substeps", "boundary_tolerance"});
    cfg.cfl_safety = get_num(jv, "solver", "cfl_safety", 0.9);
    cfg.min_substeps = static_cast<int>(get_num(jv, "solver", "min_substeps", 1));
    cfg.boundary_tolerance = get_num(jv, "solver", "boundary_tolerance", 1e-6);
  }

  if (doc.contains("tolerances")) cfg.tolerances = doc.at("tolerances");
  if (doc.contains("experiment_params")) cfg.experiment_params = doc.at("experiment_params");
  if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
  if (doc.contains("threads")) cfg.threads = doc.at("threads").get<int>();

  for (double t : cfg.snapshot_times)
    if (t < 0 || t > cfg.t_end) throw ConfigError("snapshot instant outside [0, t_end]");
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return parse_config(doc);
}

ExperimentBase RunConfig::base() const {
  ExperimentBase b;
  b.model = model;
  b.grid = grid;
  b.t_end = t_end;
  b.dt = dt;
  b.snapshot_times = snapshot_times;
  b.seeds = seeds;
  b.cfl_safety = cfl_safety;
  b.min_substeps = min_substeps;
  b.boundary_tolerance = boundary_tolerance;
  return b;
}

double RunConfig::tolerance(const std::string& key, double fallback) const {
  if (tolerances.is_object() && tolerances.contains(key)) return tolerances.at(key).get<double>();
  return fallback;
}

namespace {

FpCoefficientSpec parse_fp_coefficient(const json& j, const RunConfig& cfg) {
  require_keys(j, "experiment_params.coefficient",
               {"kind", "value", "lo", "hi", "x1", "x2", "base", "amplitude", "center", "width"});
  FpCoefficientSpec spec;
  const std::string kind = j.at("kind").get<std::string>();
  const std::string where = "experiment_params.coefficient";
  if (kind == "constant") {
    spec.kind = FpCoefficientSpec::Kind::constant;
    spec.value = get_num(j, where, "value");
  } else if (kind == "indicator") {
    spec.kind = FpCoefficientSpec::Kind::indicator;
    spec.lo = get_num(j, where, "lo");
    spec.hi = get_num(j, where, "hi");
    spec.x1 = get_num(j, where, "x1");
    spec.x2 = get_num(j, where, "x2");
  } else if (kind == "bump") {
    spec.kind = FpCoefficientSpec::Kind::bump;
    spec.base = get_num(j, where, "base", 0.0);
    spec.amplitude = get_num(j, where, "amplitude");
    spec.center = get_num(j, where, "center", 0.0);
    spec.width = get_num(j, where, "width", 1.0);
  } else if (kind == "half_phi_sq") {
    spec.kind = FpCoefficientSpec::Kind::half_phi_sq;
    spec.spec = cfg.spec;
    spec.kappa = cfg.kappa;
    spec.harvest_x0 = cfg.x0;
  } else {
    throw ConfigError("unknown coefficient kind '" + kind + "'");
  }
  return spec;
}

}  // namespace

ExperimentReport dispatch_experiment(const RunConfig& cfg) {
  ExperimentReport rep;
  if (cfg.experiment == "representation") {
    RepresentationParams p;
    p.base = cfg.base();
    p.spec = cfg.spec;
    p.kappa = cfg.kappa;
    p.x0 = cfg.x0;
    p.n_particles = cfg.n_particles;
    p.realizations = cfg.realizations;
    p.ess_floor_fraction = cfg.ess_floor_fraction;
    p.bandwidth = cfg.bandwidth;
    p.picard_sweeps = cfg.picard_sweeps;
    p.tol_terminal_l1 = cfg.tolerance("terminal_l1", 0.08);
    rep = run_representation_check(p);
  } else if (cfg.experiment == "kappa-sweep") {
    KappaSweepParams p;
    p.base = cfg.base();
    p.spec = cfg.spec;
    p.kappa_list = cfg.kappa_list;
    p.x0 = cfg.x0;
    p.realizations = cfg.realizations;
    p.tol_slope = cfg.tolerance("loglog_slope", 0.8);
    rep = run_kappa_sweep(p);
  } else if (cfg.experiment == "fp-uniqueness") {
    FpUniquenessParams p;
    p.base = cfg.base();
    if (!cfg.experiment_params.contains("coefficient"))
      throw ConfigError("fp-uniqueness needs 'experiment_params.coefficient'");
    p.coefficient = parse_fp_coefficient(cfg.experiment_params.at("coefficient"), cfg);
    p.z0 = cfg.x0;
    p.tol_fp = cfg.tolerance("l1_to_extrapolated", 1e-2);
    rep = run_fp_uniqueness(p);
  } else if (cfg.experiment == "filter-demo") {
    FilterParams p;
    p.base = cfg.base();
    if (cfg.experiment_params.contains("sigma")) {
      const json& js = cfg.experiment_params.at("sigma");
      require_keys(js, "experiment_params.sigma", {"base", "bump"});
      p.sigma_base = get_num(js, "experiment_params.sigma", "base", 1.0);
      if (js.contains("bump"))
        p.sigma_bump = parse_coefficient(js.at("bump"), "experiment_params.sigma.bump");
    }
    if (cfg.experiment_params.contains("informative"))
      p.informative = cfg.experiment_params.at("informative").get<bool>();
    p.x0 = cfg.x0;
    p.n_particles = cfg.n_particles;
    p.bandwidth = cfg.bandwidth;
    p.tol_l1 = cfg.tolerance("normalized_l1", 0.1);
    rep = run_filter_demo(p);
  } else if (cfg.experiment == "moment-bounds") {
    MomentBoundsParams p;
    p.base = cfg.base();
    if (cfg.experiment_params.contains("diffusivity"))
      p.diffusivity = cfg.experiment_params.at("diffusivity").get<double>();
    p.x0 = cfg.x0;
    p.n_particles = cfg.n_particles;
    p.realizations = cfg.realizations;
    rep = run_moment_bounds(p);
  } else if (cfg.experiment == "solve-spde") {
    SolveSpdeParams p;
    p.base = cfg.base();
    p.spec = cfg.spec;
    p.kappa = cfg.kappa;
    p.x0 = cfg.x0;
    if (cfg.experiment_params.contains("dump_noise"))
      p.dump_noise = cfg.experiment_params.at("dump_noise").get<bool>();
    rep = run_solve_spde(p);
  } else if (cfg.experiment == "solve-particles") {
    SolveParticlesParams p;
    p.base = cfg.base();
    p.spec = cfg.spec;
    p.kappa = cfg.kappa;
    p.x0 = cfg.x0;
    p.n_particles = cfg.n_particles;
    p.ess_floor_fraction = cfg.ess_floor_fraction;
    p.bandwidth = cfg.bandwidth;
    p.picard_sweeps = cfg.picard_sweeps;
    if (cfg.experiment_params.contains("dump_noise"))
      p.dump_noise = cfg.experiment_params.at("dump_noise").get<bool>();
    rep = run_solve_particles(p);
  } else {
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  }
  rep.config_echo = cfg.echo;
  return rep;
}

}  // namespace dsnld
