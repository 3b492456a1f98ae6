// Parallel kernels against their serial references on the fixture systems.
#include <benchmark/benchmark.h>

#include <string>

#include "localterm/algebra.hpp"
#include "localterm/discovery.hpp"
#include "localterm/interpretations.hpp"
#include "localterm/labeling.hpp"
#include "localterm/rfc.hpp"
#include "localterm/trs_io.hpp"

using namespace localterm;

namespace {

std::string fixture(const std::string& name) { return read_file(std::string(LOCALTERM_FIXTURES) + "/" + name); }

struct Cls {
  Trs trs = parse_trs(fixture("cls.trs"));
  FiniteAlgebra a = parse_algebra(fixture("cls.alg"), trs.signature);
};

const Cls& cls() {
  static const Cls c;
  return c;
}

// The six labeled rules of the forward-closure example.
const Trs& rfc_labeled() {
  static const Trs t = [] {
    Trs srs = parse_srs(fixture("rfc.srs"));
    MarkedSrs m = build_marked(srs);
    FiniteAlgebra a = restrict_to_core(align_algebra(parse_algebra(fixture("rfc.alg"), m.marked.signature), m.marked.signature));
    return label_trs(a, m.base, LabelOptions{true, false}).trs;
  }();
  return t;
}

void BM_PartialModel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(check_partial_model(cls().a, cls().trs).verdict);
}
void BM_PartialModelSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::check_partial_model(cls().a, cls().trs).verdict);
}

void BM_Label(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(label_trs(cls().a, cls().trs).trs.rules.size());
}
void BM_LabelSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::label_trs(cls().a, cls().trs).trs.rules.size());
}

void BM_SearchLinear(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(search_linear(rfc_labeled(), {0}, 3).has_value());
}
void BM_SearchLinearSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(serial::search_linear(rfc_labeled(), {0}, 3).has_value());
}

DiscoveryParams owl_params() {
  DiscoveryParams p;
  p.c = 3;
  p.d = 100;
  return p;
}
void BM_DiscoverOwl(benchmark::State& st) {
  Trs owl = parse_trs(fixture("owl.trs"));
  for (auto _ : st) benchmark::DoNotOptimize(discover_model(owl, owl_params()).representatives.size());
}
void BM_DiscoverOwlSerial(benchmark::State& st) {
  Trs owl = parse_trs(fixture("owl.trs"));
  for (auto _ : st) benchmark::DoNotOptimize(serial::discover_model(owl, owl_params()).representatives.size());
}

}  // namespace

BENCHMARK(BM_PartialModel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PartialModelSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Label)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LabelSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchLinear)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SearchLinearSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiscoverOwl)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiscoverOwlSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
