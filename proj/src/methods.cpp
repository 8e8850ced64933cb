#include "spmtl/methods.hpp"

#include <cmath>

namespace spmtl {

Method method_by_name(const std::string& name) {
  Method m;
  m.name = name;
  if (name == "STL") {
    m.kind = MethodKind::STL;
  } else if (name == "ITL") {
    m.kind = MethodKind::ITL;
  } else if (name == "CL") {
    m.kind = MethodKind::CL;
  } else {
    const bool sp = name.rfind("sp", 0) == 0;
    const std::string base = sp ? name.substr(2) : name;
    if (base == "MMTL") {
      m.spec.variant = Variant::MMTL;
    } else if (base == "MTFL") {
      m.spec.variant = Variant::MTFL;
    } else if (base == "MTASO") {
      m.spec.variant = Variant::MTASO;
    } else {
      throw InvalidArgument("unknown algorithm '" + name + "'");
    }
    m.kind = MethodKind::MTL;
    m.spec.self_paced = sp;
  }
  return m;
}

std::vector<std::string> known_method_names() {
  return {"STL", "ITL", "CL", "MMTL", "spMMTL", "MTFL", "spMTFL", "MTASO", "spMTASO"};
}

std::optional<std::string> baseline_of(const std::string& name) {
  if (name == "spMMTL" || name == "spMTFL" || name == "spMTASO") return name.substr(2);
  return std::nullopt;
}

FitResult fit_method(const MultitaskDataset& data, const Method& method) {
  const double gamma = method.spec.pacing.gamma;
  FitResult out;
  switch (method.kind) {
    case MethodKind::STL: {
      const Vector w = fit_stl(data, gamma);
      out.W = w.replicate(1, data.num_tasks());
      break;
    }
    case MethodKind::ITL:
      out.W = fit_itl(data, gamma, method.spec.execution);
      break;
    case MethodKind::CL: {
      CurriculumResult cl = fit_curriculum(data, gamma);
      out.W = std::move(cl.W);
      out.order = std::move(cl.order);
      break;
    }
    case MethodKind::MTL: {
      TrainReport report = fit(data, method.spec);
      out.W = report.W;
      out.report = std::move(report);
      break;
    }
  }
  return out;
}

bool is_known_parameter(const std::string& name) {
  return name == "gamma" || name == "lambda0" || name == "lambda0_scale" || name == "c" ||
         name == "delta" || name == "h" || name == "max_outer_iters" || name == "epsilon" ||
         name == "lambda_max" || name == "feature_eps";
}

bool parameter_applies(const Method& method, const std::string& name) {
  if (name == "gamma") return true;
  if (method.kind != MethodKind::MTL) return false;
  if (name == "lambda0" || name == "lambda0_scale" || name == "c" || name == "delta" ||
      name == "lambda_max") {
    return method.spec.self_paced;
  }
  if (name == "h") return method.spec.variant == Variant::MTASO;
  if (name == "feature_eps") return method.spec.variant == Variant::MTFL;
  return is_known_parameter(name);
}

void apply_parameter(Method& method, const std::string& name, double value) {
  PacingConfig& p = method.spec.pacing;
  if (name == "gamma") {
    p.gamma = value;
  } else if (name == "lambda0") {
    p.lambda0 = value;
  } else if (name == "lambda0_scale") {
    p.lambda0_scale = value;
    p.lambda0.reset();
  } else if (name == "c") {
    p.c = value;
  } else if (name == "delta") {
    p.delta = value;
  } else if (name == "h") {
    p.h = static_cast<int>(std::lround(value));
  } else if (name == "max_outer_iters") {
    p.max_outer_iters = static_cast<int>(std::lround(value));
  } else if (name == "epsilon") {
    p.epsilon = value;
  } else if (name == "lambda_max") {
    p.lambda_max = value;
  } else if (name == "feature_eps") {
    p.feature_eps = value;
  } else {
    throw InvalidArgument("unknown hyperparameter '" + name + "'");
  }
}

}  // namespace spmtl
