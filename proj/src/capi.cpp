#include "duet.h"

#include <cstring>
#include <string>

#include "duet/config.hpp"
#include "duet/errors.hpp"
#include "duet/experiments.hpp"

struct duet_config {
  duet::config::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

duet_status fail(duet_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <class Fn>
duet_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const duet::ConfigError& e) {
    return fail(DUET_INVALID_ARGUMENT, e.what());
  } catch (const duet::IoError& e) {
    return fail(DUET_IO_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(DUET_ERROR, e.what());
  } catch (...) {
    return fail(DUET_ERROR, "unknown error");
  }
}

duet_status copy_out(const std::string& s, char* buf, size_t buflen) {
  if (buf == nullptr || buflen == 0) {
    return fail(DUET_INVALID_ARGUMENT, "output buffer is null or empty");
  }
  if (s.size() + 1 > buflen) {
    return fail(DUET_INVALID_ARGUMENT,
                "output buffer too small (" + std::to_string(s.size() + 1) +
                    " bytes needed)");
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return DUET_OK;
}

}  // namespace

extern "C" {

duet_config* duet_config_create(void) {
  try {
    return new duet_config();
  } catch (...) {
    return nullptr;
  }
}

void duet_config_destroy(duet_config* cfg) { delete cfg; }

duet_status duet_config_load_file(duet_config* cfg, const char* path) {
  if (!cfg || !path) return fail(DUET_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    duet::config::load_file(cfg->cfg, path);
    return DUET_OK;
  });
}

duet_status duet_config_set(duet_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(DUET_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    duet::config::apply_kv(cfg->cfg, key, value, "flag");
    return DUET_OK;
  });
}

duet_status duet_config_get(const duet_config* cfg, const char* key, char* buf,
                            size_t buflen) {
  if (!cfg || !key) return fail(DUET_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    return copy_out(duet::config::get_kv(cfg->cfg, key), buf, buflen);
  });
}

duet_status duet_config_validate(const duet_config* cfg) {
  if (!cfg) return fail(DUET_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.validate();
    return DUET_OK;
  });
}

duet_status duet_config_digest(const duet_config* cfg, char* buf, size_t buflen) {
  if (!cfg) return fail(DUET_INVALID_ARGUMENT, "null argument");
  return guarded([&] { return copy_out(cfg->cfg.digest(), buf, buflen); });
}

duet_status duet_run(const duet_config* cfg) {
  if (!cfg) return fail(DUET_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto summary = duet::experiments::run_and_write(cfg->cfg);
    if (!summary.passed()) {
      std::string failed;
      for (const auto& b : summary.bounds) {
        if (!b.pass) {
          if (!failed.empty()) failed += "; ";
          failed += b.name;
        }
      }
      return fail(DUET_BOUND_FAILED, "bound failed: " + failed);
    }
    return DUET_OK;
  });
}

const char* duet_last_error(void) { return g_last_error.c_str(); }

int duet_experiment_count(void) {
  return static_cast<int>(duet::config::all_experiments().size());
}

const char* duet_experiment_name(int index) {
  const auto all = duet::config::all_experiments();
  if (index < 0 || index >= static_cast<int>(all.size())) return nullptr;
  return duet::config::to_string(all[static_cast<std::size_t>(index)]);
}

const char* duet_experiment_anchor(int index) {
  const auto all = duet::config::all_experiments();
  if (index < 0 || index >= static_cast<int>(all.size())) return nullptr;
  return duet::config::experiment_anchor(all[static_cast<std::size_t>(index)]);
}

const char* duet_experiment_summary(int index) {
  const auto all = duet::config::all_experiments();
  if (index < 0 || index >= static_cast<int>(all.size())) return nullptr;
  return duet::config::experiment_summary(all[static_cast<std::size_t>(index)]);
}

const char* duet_version(void) { return "0.1.0"; }

}  // extern "C"
