// Maps one short series with each rule and prints the edge lists, then runs
// a random conv bank over a synthetic QPSK channel and prints the weighted
// edges it produces.

#include <iostream>

#include "avgraph/avg.hpp"
#include "avgraph/graph_export.hpp"
#include "avgraph/synth.hpp"
#include "avgraph/visibility.hpp"

int main() {
  using namespace avgraph;

  const Series series({3.0, 1.0, 2.0, 4.0, 1.5, 2.5});

  std::cout << "series:";
  for (double v : series.values()) std::cout << " " << v;
  std::cout << "\n\nnatural visibility (u v weight):\n";
  write_edge_list(vg_naive(series), std::cout);

  std::cout << "\nhorizontal visibility:\n";
  write_edge_list(hvg(series), std::cout);

  std::cout << "\nlimited penetrable (L=1):\n";
  write_edge_list(lpvg(series, 1), std::cout);

  const IQFrame frame = generate_synthetic(Modulation::Qpsk, 12, 32, 42);
  const ConvBank bank = init_bank(4, 7);
  std::cout << "\nadaptive mapping of a QPSK I channel (random bank, m=4):\n";
  write_edge_list(avg_forward(frame.i_channel(), bank), std::cout);
  return 0;
}
