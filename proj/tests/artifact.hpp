#pragma once

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "gpa/instrument.hpp"
#include "gpa/simulate.hpp"
#include "support.hpp"

namespace gpa::test {

/// Re-parses the emitted artifact, drives it from a reference propagation of
/// the source circuit and returns the number of mismatching label bits (and
/// value bits in combined mode) over every source net. Throws
/// std::runtime_error when the artifact does not re-parse or lacks a port.
inline std::size_t artifact_mismatches(const Circuit& source, Technique tech, InstrumentMode mode, NetlistFormat fmt,
                                       std::size_t trials, std::uint64_t seed, double fraction = 0.25) {
  const Circuit bin = binarize(source);
  const InstrumentedCircuit ic = instrument(source, tech, mode);
  const std::string text = emit(ic, fmt);
  Circuit art;
  if (fmt == NetlistFormat::Bench) {
    auto r = parse_bench(text);
    if (!r.ok()) throw std::runtime_error("emitted .bench does not re-parse");
    art = std::move(*r.circuit);
  } else {
    art = read_structural_verilog(text);
  }
  auto art_net = [&](const std::string& n) {
    auto id = art.find_net(fmt == NetlistFormat::Bench ? n : mangle_verilog_identifier(n));
    if (!id) throw std::runtime_error("artifact lacks net '" + n + "'");
    return *id;
  };

  LabelProtocol p;
  p.fraction = fraction;
  TrialBatch ref = load_trials(bin, p, seed, 0, trials);
  propagate_labels(bin, ref, tech);

  TrialBatch run(art.net_count(), trials);
  if (art.inputs().size() != ic.circuit.inputs().size()) throw std::runtime_error("artifact input count differs");
  for (NetId ic_in : ic.circuit.inputs()) {
    const NetId art_in = art_net(ic.circuit.net_name(ic_in));
    if (!art.is_input(art_in)) throw std::runtime_error("artifact port is not an input");
    auto dst = run.values(art_in);
    const auto pos = std::find(ic.label_inputs.begin(), ic.label_inputs.end(), ic_in);
    const auto src = pos != ic.label_inputs.end()
                         ? ref.labels(bin.inputs()[static_cast<std::size_t>(pos - ic.label_inputs.begin())])
                         : ref.values(*bin.find_net(ic.circuit.net_name(ic_in)));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  simulate_values(art, run);

  std::size_t mismatches = 0;
  auto diff_bits = [&](std::span<const Word> a, std::span<const Word> b) {
    for (std::size_t k = 0; k < a.size(); ++k) mismatches += std::popcount((a[k] ^ b[k]) & ref.lane_mask(k));
  };
  for (NetId n = 0; n < bin.net_count(); ++n) {
    diff_bits(run.values(art_net(ic.circuit.net_name(ic.origin_map[n]))), ref.labels(n));
    if (mode == InstrumentMode::Combined) diff_bits(run.values(art_net(bin.net_name(n))), ref.values(n));
  }
  return mismatches;
}

}  // namespace gpa::test
