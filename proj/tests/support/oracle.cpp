#include "support.hpp"

namespace ml5::test {

std::vector<ValuePtr> enumerate_values(int height, const std::vector<std::string>& sites) {
  std::vector<ValuePtr> level{Value::int_(0), Value::unit()};
  for (int h = 1; h <= height; ++h) {
    std::vector<ValuePtr> next{Value::int_(0), Value::unit()};
    for (const auto& a : level) {
      next.push_back(Value::inl(a));
      next.push_back(Value::inr(a));
      for (const auto& s : sites) next.push_back(Value::box(s, a));
      for (const auto& b : level) next.push_back(Value::pair(a, b));
    }
    level = std::move(next);
  }
  return level;
}

std::vector<Type> enumerate_types(int height, const std::vector<std::string>& sites) {
  std::vector<Type> level{Type::int_(), Type::unit()};
  for (int h = 1; h <= height; ++h) {
    std::vector<Type> next{Type::int_(), Type::unit()};
    for (const auto& a : level) {
      for (const auto& s : sites) next.push_back(Type::at(a, World::site(s)));
      for (const auto& b : level) {
        next.push_back(Type::prod(a, b));
        next.push_back(Type::sum(a, b));
      }
    }
    level = std::move(next);
  }
  return level;
}

std::vector<ValuePtr> inhabitants(const Type& a, const std::string& w) {
  std::vector<ValuePtr> out;
  switch (a.kind()) {
    case TypeKind::Base:
      if (a.base_type() == BaseType::Int) out.push_back(Value::int_(0));
      if (a.base_type() == BaseType::Unit) out.push_back(Value::unit());
      break;
    case TypeKind::Prod:
      for (const auto& l : inhabitants(a.left(), w))
        for (const auto& r : inhabitants(a.right(), w)) out.push_back(Value::pair(l, r));
      break;
    case TypeKind::Sum:
      for (const auto& l : inhabitants(a.left(), w)) out.push_back(Value::inl(l));
      for (const auto& r : inhabitants(a.right(), w)) out.push_back(Value::inr(r));
      break;
    case TypeKind::At:
      for (const auto& v : inhabitants(a.left(), a.world().name())) out.push_back(Value::box(a.world().name(), v));
      break;
    default:
      break;
  }
  return out;
}

}  // namespace ml5::test
