#include "emocnn/train.hpp"

#include <charconv>

namespace emocnn {

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string format_history_csv(const History& history) {
  std::string out = "epoch,train_loss,train_acc,test_acc\n";
  for (const auto& r : history) {
    out += std::to_string(r.epoch);
    out += ',';
    append_number(out, r.train_loss);
    out += ',';
    append_number(out, r.train_accuracy);
    out += ',';
    append_number(out, r.test_accuracy);
    out += '\n';
  }
  return out;
}

}  // namespace emocnn
