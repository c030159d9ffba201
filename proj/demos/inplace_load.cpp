// Serializes the proposed model with seeded weights, then compares opening it in place
// against deserializing a copy and against parsing the text dump.

#include <chrono>
#include <cstdio>

#include "lwcnn/lwcnn.hpp"

int main() {
  using namespace lwcnn;
  const auto graph = build_proposed();
  const auto weights = demo_weights(graph, 42);
  const AlignedBytes blob(serialize_to_bytes(graph, weights));
  const auto text = write_text_model(graph, weights);

  const auto inplace = run_bench("open_inplace", 1, 20, [&] { InplaceModel::open(blob.span()); });
  const auto copy = run_bench("deserialize", 1, 20, [&] { deserialize(blob.span()); });
  const auto parse = run_bench("text parse", 1, 3, [&] { load_text_model(text); });
  std::printf("binary %zu bytes, text %zu bytes\n", blob.size(), text.size());
  std::printf("%s", render_bench({inplace, copy, parse}).c_str());

  const auto model = InplaceModel::open(blob.span());
  const auto view = model.view("layer1.w");
  std::printf("layer1.w %s, first value %.6f\n", shape_to_string(view.shape).c_str(), view.data[0]);
}
