// Exercises the shared library through its C header only.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "lexsim/lexsim.h"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp(const char* name) { return std::string("capi_") + name; }

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(lx_version()).size() > 0);
  CHECK(std::string(lx_status_name(LX_OK)) == "ok");
  CHECK(std::string(lx_status_name(LX_E_GRID_TOO_LARGE)) != "ok");
}

TEST_CASE("errors carry a status and a message") {
  lx_dataset* ds = reinterpret_cast<lx_dataset*>(0x1);
  CHECK(lx_dataset_synthesize("stargate", 3600, 1, &ds) == LX_E_INVALID_PROFILE);
  CHECK(ds == nullptr);
  CHECK(std::string(lx_last_error()).find("stargate") != std::string::npos);
  CHECK(lx_dataset_synthesize("debridge", 3600, 1, nullptr) == LX_E_INVALID_ARGUMENT);

  lx_load_options lo;
  lx_load_options_init(&lo);
  lo.traces_path = "/nonexistent.csv";
  lo.events_path = "/nonexistent-events.csv";
  CHECK(lx_dataset_load(&lo, &ds) == LX_E_FILE_MISSING);
}

TEST_CASE("synthesize, schedule, simulate and emit") {
  lx_dataset* ds = nullptr;
  REQUIRE(lx_dataset_synthesize("debridge", 2 * 86400, 7, &ds) == LX_OK);
  CHECK(lx_dataset_intent_count(ds) > 1000);
  CHECK(lx_dataset_solver_count(ds) == 9);

  char bridge[32], src[32], dst[32];
  REQUIRE(lx_dataset_busiest_route(ds, bridge, src, dst, sizeof bridge) == LX_OK);
  CHECK(std::string(bridge) == "debridge");

  int64_t start = 0, end = 0;
  lx_dataset_coverage(ds, &start, &end);
  CHECK(end > start);
  char buf[64];
  REQUIRE(lx_dataset_liquidity_at(ds, start, buf, sizeof buf) == LX_OK);
  CHECK(std::string(buf) == "514000.000000");
  CHECK(lx_dataset_liquidity_at(ds, start, buf, 3) != LX_OK);

  lx_trigger_config tc;
  lx_trigger_config_init(&tc);
  tc.k = 1;
  lx_schedule* sched = nullptr;
  REQUIRE(lx_triggers(ds, &tc, &sched) == LX_OK);
  CHECK(lx_schedule_size(sched) > 0);
  int64_t at = 0;
  double alpha = 0, liq = 0;
  REQUIRE(lx_schedule_get(sched, 0, &at, &alpha, &liq) == LX_OK);
  CHECK(alpha == 1.0);
  CHECK(lx_schedule_get(sched, 1u << 30, &at, &alpha, &liq) == LX_E_OUT_OF_RANGE);
  CHECK(lx_schedule_write_plot(ds, sched, tmp("plot.csv").c_str()) == LX_OK);
  CHECK(slurp(tmp("plot.csv")).find("trigger") != std::string::npos);

  lx_attack_config ac;
  lx_attack_config_init(&ac);
  ac.bridge = bridge;
  ac.src_chain = src;
  ac.dst_chain = dst;
  lx_run_options ro;
  lx_run_options_init(&ro);
  ro.seed = 3;
  lx_results* res = nullptr;
  REQUIRE(lx_simulate(ds, &ac, &tc, &ro, &res) == LX_OK);
  REQUIRE(lx_results_cell_count(res) == 1);
  lx_cell_summary cs;
  REQUIRE(lx_results_cell(res, 0, &cs) == LX_OK);
  CHECK(cs.n_attacks == static_cast<int64_t>(lx_schedule_size(sched)));
  CHECK(std::string(cs.fingerprint).size() == 16);

  REQUIRE(lx_results_emit(res, tmp("a.csv").c_str(), LX_FORMAT_DELIMITED) == LX_OK);
  lx_results* again = nullptr;
  REQUIRE(lx_simulate(ds, &ac, &tc, &ro, &again) == LX_OK);
  REQUIRE(lx_results_emit(again, tmp("b.csv").c_str(), LX_FORMAT_DELIMITED) == LX_OK);
  CHECK(slurp(tmp("a.csv")) == slurp(tmp("b.csv")));
  CHECK(lx_results_write_instances(res, 0, tmp("inst.jsonl").c_str(), LX_FORMAT_RECORD_STREAM) == LX_OK);
  CHECK(lx_results_write_instances(res, 5, tmp("inst.jsonl").c_str(), LX_FORMAT_RECORD_STREAM) == LX_E_OUT_OF_RANGE);

  // Grid axes and the size cap.
  const unsigned ks[] = {0, 1, 2};
  const int64_t ws[] = {300, 1000};
  const char* margins[] = {"0.018", nullptr, "1.129"};
  lx_sweep_axes ax;
  lx_sweep_axes_init(&ax);
  ax.k = ks;
  ax.n_k = 3;
  ax.attack_window_s = ws;
  ax.n_attack_window = 2;
  ax.solver_profit_percent = margins;
  ax.n_solver_profit = 3;
  lx_results* grid = nullptr;
  REQUIRE(lx_sweep(ds, &ac, &ax, &tc, &ro, &grid) == LX_OK);
  CHECK(lx_results_cell_count(grid) == 18);
  ax.max_cells = 10;
  lx_results* refused = nullptr;
  CHECK(lx_sweep(ds, &ac, &ax, &tc, &ro, &refused) == LX_E_GRID_TOO_LARGE);
  CHECK(refused == nullptr);

  // Byzantine run at fixed placements.
  const int64_t times[] = {start + 3600, start + 7200};
  ac.mode = LX_MODE_BYZANTINE;
  ro.fixed_times = times;
  ro.n_fixed_times = 2;
  lx_results* byz = nullptr;
  REQUIRE(lx_simulate(ds, &ac, &tc, &ro, &byz) == LX_OK);
  REQUIRE(lx_results_cell(byz, 0, &cs) == LX_OK);
  CHECK(cs.n_attacks == 2);
  CHECK(cs.median_total_cost > 0);

  // Files written by the library load back into an equal dataset.
  REQUIRE(lx_dataset_write(ds, tmp("t.csv").c_str(), tmp("e.csv").c_str(), tmp("b.csv").c_str()) == LX_OK);
  lx_load_options lo;
  lx_load_options_init(&lo);
  lo.traces_path = "capi_t.csv";
  lo.events_path = "capi_e.csv";
  lo.balances_path = "capi_b.csv";
  lx_dataset* back = nullptr;
  REQUIRE(lx_dataset_load(&lo, &back) == LX_OK);
  CHECK(lx_dataset_intent_count(back) == lx_dataset_intent_count(ds));
  char buf2[64];
  REQUIRE(lx_dataset_liquidity_at(back, start + 5000, buf2, sizeof buf2) == LX_OK);
  REQUIRE(lx_dataset_liquidity_at(ds, start + 5000, buf, sizeof buf) == LX_OK);
  CHECK(std::string(buf) == std::string(buf2));

  lx_results_free(byz);
  lx_results_free(grid);
  lx_results_free(again);
  lx_results_free(res);
  lx_schedule_free(sched);
  lx_dataset_free(back);
  lx_dataset_free(ds);
  for (const char* f : {"plot.csv", "a.csv", "b.csv", "inst.jsonl", "t.csv", "e.csv"}) std::remove(tmp(f).c_str());
}
