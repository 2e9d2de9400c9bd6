#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "qmkdv/error.hpp"
#include "qmkdv/integrator.hpp"
#include "qmkdv/snapshot.hpp"

using namespace qmkdv;

namespace {

SimConfig small_config() {
  SimConfig s;
  s.grid = GridSpec(128, 40.0);
  s.init.amplitude = 0.3;
  s.init.width = 2.0;
  s.t_end = 1.0;
  return s;
}

}  // namespace

TEST_CASE("initial data has zero mean and the requested shape") {
  auto cfg = small_config();
  cfg.init.wavenumber = 1.0;
  const auto phi = make_initial_field(cfg);
  CHECK(std::abs(phi.at(0)) == 0.0);
  CHECK(conjugate_asymmetry(phi) < 1e-15);
}

TEST_CASE("linear-only runs reproduce the free group") {
  auto cfg = small_config();
  cfg.linear_only = true;
  cfg.t_end = 3.0;
  const auto res = run(cfg);
  const auto exact = free_evolve(make_initial_field(cfg), 3.0);
  CHECK(norm(res.final_state.phi - exact, NormKind::L2) < 1e-11);
  CHECK(res.final_state.t == 3.0);
}

TEST_CASE("fixed-step Lawson RK4 converges at fourth order") {
  auto cfg = small_config();
  cfg.init.width = 3.0;
  const auto phi0 = make_initial_field(cfg);
  const auto a = integrate_fixed(phi0, cfg, 0.02, 1.0);
  const auto b = integrate_fixed(phi0, cfg, 0.01, 1.0);
  const auto c = integrate_fixed(phi0, cfg, 0.005, 1.0);
  const double order = std::log2(spectral_l2(a - b) / spectral_l2(b - c));
  CHECK(order == doctest::Approx(4.0).epsilon(0.075));
}

TEST_CASE("monitors land on the requested times and conserve mass") {
  auto cfg = small_config();
  cfg.t_end = 2.0;
  cfg.monitor_every = 0.5;
  cfg.extra_stops = {0.3};
  std::vector<double> stops;
  RunCallbacks cb;
  cb.on_stop = [&](const SimState& st) { stops.push_back(st.t); };
  const auto res = run(cfg, cb);
  REQUIRE(res.monitors.size() == 5);
  for (std::size_t i = 0; i < res.monitors.size(); ++i) CHECK(res.monitors[i].t == 0.5 * static_cast<double>(i));
  for (const auto& m : res.monitors) CHECK(std::abs(m.mass) < 1e-14);
  REQUIRE(stops.size() == 1);
  CHECK(stops[0] == 0.3);
  const double h0 = res.monitors.front().hamiltonian;
  for (const auto& m : res.monitors) CHECK(std::abs(m.hamiltonian - h0) < 1e-7 * std::abs(h0));
}

TEST_CASE("configuration validation") {
  auto cfg = small_config();
  cfg.tolerance = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = small_config();
  cfg.t_end = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("snapshots round trip bit for bit") {
  auto cfg = small_config();
  const auto phi = make_initial_field(cfg);
  SpectralField f = free_evolve(phi, 0.7);
  f.set_time(0.7);
  const auto path = std::filesystem::temp_directory_path() / "qmkdv_unit_snapshot.qmkdv";
  write_snapshot(path, f, "linear(a=1)");
  const auto snap = read_snapshot(path);
  CHECK(snap.coefficient_id == "linear(a=1)");
  CHECK(snap.field.grid() == f.grid());
  CHECK(snap.field.time() == 0.7);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(snap.field.coeffs()[i] == f.coeffs()[i]);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_snapshot(path), Error);
}

TEST_CASE("a run restarted from a snapshot continues the same trajectory") {
  auto cfg = small_config();
  cfg.t_end = 0.5;
  const auto first = run(cfg);
  const auto path = std::filesystem::temp_directory_path() / "qmkdv_unit_restart.qmkdv";
  SpectralField mid = first.final_state.phi;
  mid.set_time(0.5);
  write_snapshot(path, mid, cfg.coeff.identifier());
  auto cont = cfg;
  cont.init.snapshot_path = path.string();
  cont.t_start = 0.5;
  cont.t_end = 1.0;
  const auto second = run(cont);
  auto whole = cfg;
  whole.t_end = 1.0;
  const auto ref = run(whole);
  CHECK(spectral_l2(second.final_state.phi - ref.final_state.phi) < 1e-8 * spectral_l2(ref.final_state.phi));
  std::filesystem::remove(path);
}
