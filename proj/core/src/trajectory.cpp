#include "qduet/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qduet {

const char* to_string(UnravelingKind kind) {
  switch (kind) {
    case UnravelingKind::Counting: return "counting";
    case UnravelingKind::DisplacedCounting: return "displaced_counting";
    case UnravelingKind::HomodyneDiffusion: return "homodyne_diffusion";
  }
  return "unknown";
}

UnravelingKind unraveling_from_string(const std::string& name) {
  for (UnravelingKind kind : {UnravelingKind::Counting, UnravelingKind::DisplacedCounting,
                              UnravelingKind::HomodyneDiffusion}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown unraveling kind: " + name);
}

namespace {

const Complex kMinusI(0.0, -1.0);

void check_counting_stability(const ModelParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (dt * p.total_rate() >= 0.1) {
    throw std::invalid_argument("stability guard violated: dt * total_rate must be < 0.1");
  }
}

} // namespace

JumpProcess::JumpProcess(Operator h_eff, std::vector<JumpChannel> channels, double dt)
    : h_eff_(std::move(h_eff)), channels_(std::move(channels)), dt_(dt) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("JumpProcess: dt must be > 0");
}

StateVector JumpProcess::rk4_step(const StateVector& psi, double h) const {
  const StateVector k1 = kMinusI * (h_eff_ * psi);
  const StateVector k2 = kMinusI * (h_eff_ * (psi + (0.5 * h) * k1));
  const StateVector k3 = kMinusI * (h_eff_ * (psi + (0.5 * h) * k2));
  const StateVector k4 = kMinusI * (h_eff_ * (psi + h * k3));
  return psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

bool JumpProcess::stationary(const StateVector& psi) const {
  for (const auto& ch : channels_) {
    if ((ch.op * psi).squaredNorm() != 0.0) return false;
  }
  const double norm2 = psi.squaredNorm();
  if (norm2 == 0.0) return true;
  const Complex lambda = psi.dot(h_eff_ * psi) / norm2;
  return (h_eff_ * psi - lambda * psi).norm() <= 1e-12 * std::sqrt(norm2);
}

double JumpProcess::advance(StateVector& psi, double t, double t_stop, double threshold,
                            bool& crossed) const {
  crossed = false;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_stop));
  while (t < t_stop - eps) {
    const double h = std::min(dt_, t_stop - t);
    const StateVector before = psi;
    StateVector after = rk4_step(before, h);
    if (after.squaredNorm() > threshold) {
      psi = after;
      t += h;
      continue;
    }

    // Locate the crossing time inside (t, t+h] on log ||psi||^2, which is
    // near-linear between jumps.
    double h_lo = 0.0, h_hi = h;
    double g_lo = std::log(before.squaredNorm() / threshold);
    double g_hi = std::log(after.squaredNorm() / threshold);
    double h_mid = h;
    for (int iter = 0; iter < 60; ++iter) {
      if (std::abs(g_hi) < 1e-12 || (h_hi - h_lo) < 1e-14 * std::max(dt_, 1e-30)) break;
      h_mid = (g_lo > g_hi) ? h_lo + (h_hi - h_lo) * g_lo / (g_lo - g_hi)
                            : 0.5 * (h_lo + h_hi);
      h_mid = std::min(std::max(h_mid, h_lo + 1e-16 * dt_), h_hi);
      const StateVector probe = rk4_step(before, h_mid);
      const double g = std::log(probe.squaredNorm() / threshold);
      if (g > 0.0) {
        h_lo = h_mid;
        g_lo = g;
      } else {
        h_hi = h_mid;
        g_hi = g;
        after = probe;
      }
    }
    psi = after;
    crossed = true;
    return t + h_hi;
  }
  return t_stop;
}

std::vector<JumpChannel> displaced_channels(const std::vector<JumpChannel>& channels,
                                            double beta) {
  std::vector<JumpChannel> out = channels;
  for (auto& ch : out) ch.op += beta * Operator::Identity();
  return out;
}

Operator displaced_effective_hamiltonian(const Operator& h,
                                         const std::vector<JumpChannel>& channels,
                                         double beta) {
  Operator drive = Operator::Zero();
  const Complex half_i(0.0, 0.5);
  for (const auto& ch : channels) {
    drive -= half_i * (ch.rate * beta) * (ch.op - ch.op.adjoint());
  }
  return build_effective_hamiltonian(h + drive, displaced_channels(channels, beta));
}

StateVector evolve_no_jump(const ModelParams& p, const StateVector& psi, double dt) {
  check_counting_stability(p, dt);
  JumpProcess process(build_effective_hamiltonian(p), build_channels(p), dt);
  return process.rk4_step(psi, dt);
}

std::vector<double> jump_weights(const std::vector<JumpChannel>& channels,
                                 const StateVector& psi) {
  std::vector<double> weights;
  weights.reserve(channels.size());
  for (const auto& ch : channels) {
    weights.push_back(ch.rate * (ch.op * psi).squaredNorm());
  }
  return weights;
}

ChannelLabel select_jump_channel(const std::vector<JumpChannel>& channels,
                                 const StateVector& psi, Rng& rng) {
  const std::vector<double> weights = jump_weights(channels, psi);
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) {
    throw std::domain_error("select_jump_channel: no jump possible (all weights zero)");
  }
  const double r = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    acc += weights[k];
    if (r <= acc) return channels[k].label;
  }
  return channels.back().label;
}

StateVector apply_jump(const JumpChannel& channel, const StateVector& psi) {
  StateVector out = channel.op * psi;
  const double norm = out.norm();
  if (!(norm > 0.0)) {
    throw std::domain_error("apply_jump: state annihilated by the jump operator");
  }
  return out / norm;
}

WaitingTimeResult sample_waiting_time(const ModelParams& p, const StateVector& psi0,
                                      Rng& rng, double horizon, double dt) {
  check_counting_stability(p, dt);
  JumpProcess process(build_effective_hamiltonian(p), build_channels(p), dt);
  StateVector psi = psi0.normalized();
  const double r = rng.uniform();
  if (process.stationary(psi)) return {std::nullopt, psi};
  bool crossed = false;
  const double t = process.advance(psi, 0.0, horizon, r, crossed);
  if (crossed) return {t, psi};
  return {std::nullopt, psi};
}

namespace {

struct SampleSink {
  TrajectoryRecord* record;
  StateVector bell_plus, bell_minus;

  explicit SampleSink(TrajectoryRecord* rec) : record(rec) {
    auto [plus, minus] = bell_states();
    bell_plus = plus;
    bell_minus = minus;
  }

  void operator()(double t, const StateVector& psi, double segment_norm2) const {
    const double norm2 = psi.squaredNorm();
    record->sample_times.push_back(t);
    record->n1.push_back(std::real(psi.dot(number_op1() * psi)) / norm2);
    record->n2.push_back(std::real(psi.dot(number_op2() * psi)) / norm2);
    record->norm2.push_back(segment_norm2);
    record->bell_plus.push_back(std::norm(bell_plus.dot(psi)) / norm2);
    record->bell_minus.push_back(std::norm(bell_minus.dot(psi)) / norm2);
  }
};

struct RunOutput {
  TrajectoryRecord record;
  FinalClass final_class = FinalClass::Ground;
  double first_jump_time = -1.0;
};

FinalClass classify(const StateVector& psi) {
  const double norm2 = psi.squaredNorm();
  const double n_tot =
      (std::real(psi.dot(number_op1() * psi)) + std::real(psi.dot(number_op2() * psi))) /
      norm2;
  const double rounded = std::round(n_tot);
  if (std::abs(n_tot - rounded) > 1e-6) return FinalClass::Mixed;
  switch (static_cast<int>(rounded)) {
    case 0: return FinalClass::Ground;
    case 1: return FinalClass::OneExcitation;
    default: return FinalClass::TwoExcitations;
  }
}

RunOutput run_counting_impl(const JumpProcess& process, const StateVector& psi0,
                            double t_max, double sample_dt, std::uint64_t seed,
                            UnravelingKind kind, double beta,
                            const EngineOptions& options) {
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be > 0");
  if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be >= 0");

  RunOutput out;
  out.record.seed = seed;
  out.record.kind = kind;
  out.record.beta = beta;
  SampleSink sample(&out.record);

  Rng rng(seed);
  StateVector psi = psi0.normalized();
  double t = 0.0;
  long sample_index = 0;
  const double eps = 1e-12 * std::max(1.0, t_max);

  if (options.keep_samples) {
    sample(0.0, psi, 1.0);
  }
  ++sample_index;

  double threshold = rng.uniform();
  while (t < t_max - eps) {
    if (process.stationary(psi)) {
      // Dark and stationary: nothing can happen anymore; emit the remaining
      // samples as constants.
      if (options.keep_samples) {
        const double norm2 = psi.squaredNorm();
        for (double ts = sample_dt * static_cast<double>(sample_index); ts <= t_max + eps;
             ts = sample_dt * static_cast<double>(++sample_index)) {
          sample(std::min(ts, t_max), psi / std::sqrt(norm2), 1.0);
        }
      }
      t = t_max;
      break;
    }

    const double next_sample = sample_dt * static_cast<double>(sample_index);
    const double target = std::min(t_max, next_sample);
    bool crossed = false;
    t = process.advance(psi, t, target, threshold, crossed);
    if (crossed) {
      const ChannelLabel label = select_jump_channel(process.channels(), psi, rng);
      if (out.record.events.empty()) out.first_jump_time = t;
      out.record.events.push_back({t, label});
      for (const auto& ch : process.channels()) {
        if (ch.label == label) {
          psi = apply_jump(ch, psi);
          break;
        }
      }
      threshold = rng.uniform();
    } else if (std::abs(t - next_sample) <= eps) {
      if (options.keep_samples) sample(t, psi, psi.squaredNorm());
      ++sample_index;
    }
  }
  out.final_class = classify(psi);
  return out;
}

RunOutput run_bernoulli_impl(const JumpProcess& process, const StateVector& psi0,
                             double t_max, double sample_dt, std::uint64_t seed,
                             const EngineOptions& options) {
  RunOutput out;
  out.record.seed = seed;
  out.record.kind = UnravelingKind::Counting;
  SampleSink sample(&out.record);

  Rng rng(seed);
  StateVector psi = psi0.normalized();
  double t = 0.0;
  double segment_norm2 = 1.0; // cumulative no-jump weight since the last jump
  long sample_index = 0;
  const double eps = 1e-12 * std::max(1.0, t_max);

  if (options.keep_samples) sample(0.0, psi, 1.0);
  ++sample_index;

  while (t < t_max - eps) {
    const double next_sample = sample_dt * static_cast<double>(sample_index);
    const double target = std::min(t_max, next_sample);
    while (t < target - eps) {
      const double h = std::min(process.dt(), target - t);
      const std::vector<double> weights = jump_weights(process.channels(), psi);
      double total = 0.0;
      for (double w : weights) total += w;
      const double p_jump = total * h;
      if (rng.uniform() < p_jump) {
        const ChannelLabel label = select_jump_channel(process.channels(), psi, rng);
        if (out.record.events.empty()) out.first_jump_time = t + h;
        out.record.events.push_back({t + h, label});
        for (const auto& ch : process.channels()) {
          if (ch.label == label) {
            psi = apply_jump(ch, psi);
            break;
          }
        }
        segment_norm2 = 1.0;
      } else {
        psi = process.rk4_step(psi, h);
        const double norm2 = psi.squaredNorm();
        segment_norm2 *= norm2;
        psi /= std::sqrt(norm2);
      }
      t += h;
    }
    t = target;
    if (std::abs(t - next_sample) <= eps && t <= t_max + eps) {
      if (options.keep_samples) sample(t, psi, segment_norm2);
      ++sample_index;
    }
  }
  out.final_class = classify(psi);
  return out;
}

RunOutput run_diffusion_impl(const Operator& h, const std::vector<JumpChannel>& channels,
                             const StateVector& psi0, double t_max, double sample_dt,
                             std::uint64_t seed, const EngineOptions& options) {
  RunOutput out;
  out.record.seed = seed;
  out.record.kind = UnravelingKind::HomodyneDiffusion;
  SampleSink sample(&out.record);

  struct Term {
    Operator op;          // J
    Operator half_jdagj;  // rate J^dag J / 2
    double rate;
    double sqrt_rate;
  };
  std::vector<Term> terms;
  terms.reserve(channels.size());
  for (const auto& ch : channels) {
    terms.push_back({ch.op, 0.5 * ch.rate * (ch.op.adjoint() * ch.op), ch.rate,
                     std::sqrt(ch.rate)});
  }

  Rng rng(seed);
  StateVector psi = psi0.normalized();
  double t = 0.0;
  long sample_index = 0;
  const double eps = 1e-12 * std::max(1.0, t_max);

  if (options.keep_samples) sample(0.0, psi, 1.0);
  ++sample_index;

  while (t < t_max - eps) {
    const double next_sample = sample_dt * static_cast<double>(sample_index);
    const double target = std::min(t_max, next_sample);
    while (t < target - eps) {
      const double step = std::min(options.dt, target - t);
      const double sqrt_step = std::sqrt(step);
      StateVector dpsi = kMinusI * (h * psi) * step;
      for (const auto& term : terms) {
        const StateVector jpsi = term.op * psi;
        const double quad = 2.0 * std::real(psi.dot(jpsi)); // <J + J^dag>
        dpsi -= step * (term.half_jdagj * psi);
        dpsi += (step * term.rate * 0.5 * quad) * jpsi;
        dpsi -= (step * term.rate * 0.125 * quad * quad) * psi;
        const double noise = rng.normal() * sqrt_step;
        dpsi += (term.sqrt_rate * noise) * (jpsi - (0.5 * quad) * psi);
      }
      psi += dpsi;
      psi.normalize();
      t += step;
    }
    t = target;
    if (std::abs(t - next_sample) <= eps && t <= t_max + eps) {
      if (options.keep_samples) sample(t, psi, 1.0);
      ++sample_index;
    }
  }
  out.final_class = classify(psi);
  return out;
}

RunOutput run_one(const Operator& h, const std::vector<JumpChannel>& channels,
                  const StateVector& psi0, double t_max, double sample_dt,
                  std::uint64_t seed, UnravelingKind kind, double beta,
                  const EngineOptions& options) {
  switch (kind) {
    case UnravelingKind::Counting: {
      JumpProcess process(build_effective_hamiltonian(h, channels), channels, options.dt);
      if (options.bernoulli_mode) {
        return run_bernoulli_impl(process, psi0, t_max, sample_dt, seed, options);
      }
      return run_counting_impl(process, psi0, t_max, sample_dt, seed,
                               UnravelingKind::Counting, 0.0, options);
    }
    case UnravelingKind::DisplacedCounting: {
      JumpProcess process(displaced_effective_hamiltonian(h, channels, beta),
                          displaced_channels(channels, beta), options.dt);
      return run_counting_impl(process, psi0, t_max, sample_dt, seed,
                               UnravelingKind::DisplacedCounting, beta, options);
    }
    case UnravelingKind::HomodyneDiffusion:
      return run_diffusion_impl(h, channels, psi0, t_max, sample_dt, seed, options);
  }
  throw std::logic_error("unreachable unraveling kind");
}

void check_kind_preconditions(const ModelParams& p, UnravelingKind kind, double beta,
                              const EngineOptions& options) {
  check_counting_stability(p, options.dt);
  if (kind == UnravelingKind::DisplacedCounting) {
    if (!(beta > 0.0)) {
      throw std::invalid_argument("DisplacedCounting requires beta > 0");
    }
    if (options.dt * beta * beta * p.total_rate() >= 0.1) {
      throw std::invalid_argument(
          "step-size guard violated: dt * beta^2 * total_rate must be < 0.1");
    }
  }
}

} // namespace

TrajectoryRecord run_counting_trajectory(const ModelParams& p, const StateVector& psi0,
                                         double t_max, double sample_dt,
                                         std::uint64_t seed, const EngineOptions& options) {
  return run_trajectory(p, psi0, t_max, sample_dt, seed, UnravelingKind::Counting, 0.0,
                        options);
}

TrajectoryRecord run_homodyne_trajectory(const ModelParams& p, const StateVector& psi0,
                                         double t_max, double sample_dt,
                                         std::uint64_t seed, UnravelingKind kind,
                                         double beta, const EngineOptions& options) {
  if (kind == UnravelingKind::Counting) {
    throw std::invalid_argument("run_homodyne_trajectory: expected a homodyne kind");
  }
  return run_trajectory(p, psi0, t_max, sample_dt, seed, kind, beta, options);
}

TrajectoryRecord run_trajectory(const ModelParams& p, const StateVector& psi0,
                                double t_max, double sample_dt, std::uint64_t seed,
                                UnravelingKind kind, double beta,
                                const EngineOptions& options) {
  check_kind_preconditions(p, kind, beta, options);
  return run_one(build_hamiltonian(p), build_channels(p), psi0, t_max, sample_dt,
                 seed, kind, beta, options)
      .record;
}

namespace {

// Fixed-size accumulation blocks keep the merge order independent of the
// worker count, so ensemble outputs are bitwise reproducible.
constexpr std::size_t kBlockSize = 64;

struct BlockAccumulator {
  std::vector<double> s1, s1sq, s2, s2sq, snorm;
  std::vector<std::array<std::int64_t, 6>> jump_counts;

  void init(std::size_t n_samples, std::size_t n_bins) {
    s1.assign(n_samples, 0.0);
    s1sq.assign(n_samples, 0.0);
    s2.assign(n_samples, 0.0);
    s2sq.assign(n_samples, 0.0);
    snorm.assign(n_samples, 0.0);
    jump_counts.assign(n_bins, {0, 0, 0, 0, 0, 0});
  }
};

template <typename PerTrajectory>
void parallel_blocks(std::size_t n_traj, unsigned workers, PerTrajectory&& body) {
  const std::size_t n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;
  unsigned n_workers = workers == 0 ? std::thread::hardware_concurrency() : workers;
  if (n_workers == 0) n_workers = 1;
  n_workers = static_cast<unsigned>(
      std::min<std::size_t>(n_workers, std::max<std::size_t>(n_blocks, 1)));

  std::atomic<std::size_t> next_block{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&]() {
    try {
      for (;;) {
        const std::size_t block = next_block.fetch_add(1);
        if (block >= n_blocks) return;
        const std::size_t begin = block * kBlockSize;
        const std::size_t end = std::min(begin + kBlockSize, n_traj);
        for (std::size_t i = begin; i < end; ++i) body(block, i);
      }
    } catch (...) {
      std::scoped_lock lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace

EnsembleResult run_ensemble(const ModelParams& p, const StateVector& psi0,
                            std::size_t n_traj, double t_max, double sample_dt,
                            std::uint64_t master_seed, UnravelingKind kind, double beta,
                            unsigned workers, const EngineOptions& options) {
  if (n_traj == 0) throw std::invalid_argument("n_traj must be >= 1");
  check_kind_preconditions(p, kind, beta, options);

  const Operator h = build_hamiltonian(p);
  const std::vector<JumpChannel> channels = build_channels(p);

  const std::size_t n_samples = static_cast<std::size_t>(std::floor(t_max / sample_dt + 1e-9)) + 1;
  const std::size_t n_bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t_max / sample_dt - 1e-9)));
  const std::size_t n_blocks = (n_traj + kBlockSize - 1) / kBlockSize;

  EngineOptions per_traj = options;
  per_traj.keep_samples = true;

  EnsembleResult result;
  result.n_traj = n_traj;
  result.kind = kind;
  result.bin_width = sample_dt;
  result.first_jump_time.assign(n_traj, -1.0);
  result.final_class.assign(n_traj, FinalClass::Ground);

  std::vector<BlockAccumulator> blocks(n_blocks);
  for (auto& b : blocks) b.init(n_samples, n_bins);

  std::vector<double> sample_times;
  std::mutex sample_times_mutex;

  parallel_blocks(n_traj, workers, [&](std::size_t block, std::size_t i) {
    const RunOutput out = run_one(h, channels, psi0, t_max, sample_dt,
                                  child_seed(master_seed, i), kind, beta, per_traj);
    BlockAccumulator& acc = blocks[block];
    const std::size_t m = std::min(n_samples, out.record.sample_times.size());
    for (std::size_t k = 0; k < m; ++k) {
      const double v1 = out.record.n1[k];
      const double v2 = out.record.n2[k];
      acc.s1[k] += v1;
      acc.s1sq[k] += v1 * v1;
      acc.s2[k] += v2;
      acc.s2sq[k] += v2 * v2;
      acc.snorm[k] += out.record.norm2[k];
    }
    for (const auto& ev : out.record.events) {
      std::size_t bin = static_cast<std::size_t>(ev.time / sample_dt);
      if (bin >= n_bins) bin = n_bins - 1;
      acc.jump_counts[bin][static_cast<int>(ev.channel)] += 1;
    }
    result.first_jump_time[i] = out.first_jump_time;
    result.final_class[i] = out.final_class;
    if (i == 0) {
      std::scoped_lock lock(sample_times_mutex);
      sample_times = out.record.sample_times;
    }
  });

  result.sample_times = std::move(sample_times);
  result.n1_mean.assign(n_samples, 0.0);
  result.n1_stderr.assign(n_samples, 0.0);
  result.n2_mean.assign(n_samples, 0.0);
  result.n2_stderr.assign(n_samples, 0.0);
  result.norm2_mean.assign(n_samples, 0.0);
  result.jump_counts.assign(n_bins, {0, 0, 0, 0, 0, 0});

  std::vector<double> s1(n_samples, 0.0), s1sq(n_samples, 0.0);
  std::vector<double> s2(n_samples, 0.0), s2sq(n_samples, 0.0);
  std::vector<double> snorm(n_samples, 0.0);
  for (const auto& b : blocks) { // fixed order: bitwise reproducible
    for (std::size_t k = 0; k < n_samples; ++k) {
      s1[k] += b.s1[k];
      s1sq[k] += b.s1sq[k];
      s2[k] += b.s2[k];
      s2sq[k] += b.s2sq[k];
      snorm[k] += b.snorm[k];
    }
    for (std::size_t k = 0; k < n_bins; ++k) {
      for (int c = 0; c < 6; ++c) result.jump_counts[k][c] += b.jump_counts[k][c];
    }
  }

  const double n = static_cast<double>(n_traj);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double m1 = s1[k] / n;
    const double m2 = s2[k] / n;
    result.n1_mean[k] = m1;
    result.n2_mean[k] = m2;
    result.norm2_mean[k] = snorm[k] / n;
    if (n_traj > 1) {
      const double var1 = std::max(0.0, (s1sq[k] - n * m1 * m1) / (n - 1.0));
      const double var2 = std::max(0.0, (s2sq[k] - n * m2 * m2) / (n - 1.0));
      result.n1_stderr[k] = std::sqrt(var1 / n);
      result.n2_stderr[k] = std::sqrt(var2 / n);
    }
  }
  return result;
}

std::vector<TrajectoryRecord> run_records(const ModelParams& p, const StateVector& psi0,
                                          std::size_t n_traj, double t_max,
                                          double sample_dt, std::uint64_t master_seed,
                                          UnravelingKind kind, double beta,
                                          unsigned workers, const EngineOptions& options) {
  if (n_traj == 0) throw std::invalid_argument("n_traj must be >= 1");
  check_kind_preconditions(p, kind, beta, options);

  const Operator h = build_hamiltonian(p);
  const std::vector<JumpChannel> channels = build_channels(p);

  std::vector<TrajectoryRecord> records(n_traj);
  parallel_blocks(n_traj, workers, [&](std::size_t, std::size_t i) {
    records[i] = run_one(h, channels, psi0, t_max, sample_dt,
                         child_seed(master_seed, i), kind, beta, options)
                     .record;
  });
  return records;
}

} // namespace qduet
