#include "dae/core_model.hpp"

#include <algorithm>
#include <cassert>

namespace dae {

void expand_slice(const ValidatedKernel& kernel, int64_t begin, int64_t end, SliceOps* out) {
  out->clear();
  const auto& body = kernel.body();
  // Map body position -> op index for the current iteration; -1 when the
  // instance was predicated off (the dependency edge just disappears).
  std::vector<int32_t> instance(body.size());
  for (int64_t i = begin; i < end; ++i) {
    std::fill(instance.begin(), instance.end(), -1);
    for (size_t p = 0; p < body.size(); ++p) {
      const Instr& ins = body[p];
      if (!kernel.predicate_taken(ins, i)) continue;
      SliceOp op;
      op.ins = &ins;
      op.iteration = i;
      if (ins.is_memory()) op.addr = kernel.byte_address(ins.addr, i);
      op.first_dep = static_cast<int32_t>(out->deps.size());
      auto add_dep = [&](InstrId id) {
        if (id == kNoInstr) return;
        int32_t inst = instance[static_cast<size_t>(id)];
        if (inst < 0) return;
        for (int32_t d = op.first_dep; d < static_cast<int32_t>(out->deps.size()); ++d)
          if (out->deps[static_cast<size_t>(d)] == inst) return;
        out->deps.push_back(inst);
      };
      for (InstrId in : ins.inputs) add_dep(in);
      if (ins.is_memory()) {
        add_dep(ins.addr.calc);
        add_dep(ins.addr.source);
      }
      op.dep_count = static_cast<int32_t>(out->deps.size()) - op.first_dep;
      instance[p] = static_cast<int32_t>(out->ops.size());
      if (ins.kind == InstrKind::Prefetch) out->prefetch_count++;
      out->ops.push_back(op);
    }
  }
  // Forward adjacency (who consumes each op's result), used by the engine's
  // event-driven wakeups.
  std::vector<int32_t> counts(out->ops.size(), 0);
  for (const SliceOp& op : out->ops)
    for (int32_t d = 0; d < op.dep_count; ++d)
      counts[static_cast<size_t>(out->deps[static_cast<size_t>(op.first_dep + d)])]++;
  out->consumers.resize(out->deps.size());
  int32_t offset = 0;
  for (size_t k = 0; k < out->ops.size(); ++k) {
    out->ops[k].first_consumer = offset;
    out->ops[k].consumer_count = 0;
    offset += counts[k];
  }
  for (size_t k = 0; k < out->ops.size(); ++k) {
    const SliceOp& op = out->ops[k];
    for (int32_t d = 0; d < op.dep_count; ++d) {
      SliceOp& dep = out->ops[static_cast<size_t>(out->deps[static_cast<size_t>(op.first_dep + d)])];
      out->consumers[static_cast<size_t>(dep.first_consumer + dep.consumer_count++)] =
          static_cast<int32_t>(k);
    }
  }
}

CoreRunner::CoreRunner(const MachineConfig& cfg, ClusterId cluster, MemorySystem* ms)
    : cfg_(cfg),
      cluster_(cluster),
      ms_(ms),
      period_(cfg.cluster(cluster).core.period_fs()),
      l1_fs_(fs_from_ns(cfg.cluster(cluster).l1d.hit_ns)) {}

void InOrderRunner::begin_slice(const SliceOps* ops, TimeFs start) {
  ops_ = ops;
  idx_ = 0;
  time_ = start;
  stats_ = {};
  prefetches_issued_ = 0;
}

void InOrderRunner::advance() {
  const SliceOp& op = ops_->ops[static_cast<size_t>(idx_)];
  const Instr& ins = *op.ins;
  switch (ins.kind) {
    case InstrKind::AddrCalc:
    case InstrKind::Compute:
      time_ += static_cast<TimeFs>(ins.cost_ops) * period_;
      stats_.cycles += ins.cost_ops;
      stats_.retired += ins.cost_ops;
      break;
    case InstrKind::Prefetch: {
      PrefetchOutcome r = ms_->issue_prefetch(cluster_, op.addr, time_);
      switch (r) {
        case PrefetchOutcome::Enqueued: stats_.prefetch.enqueued++; break;
        case PrefetchOutcome::Deduped: stats_.prefetch.deduped++; break;
        case PrefetchOutcome::Dropped: stats_.prefetch.dropped++; break;
      }
      time_ += period_;
      stats_.cycles += 1;
      stats_.retired += 1;
      prefetches_issued_++;
      break;
    }
    case InstrKind::Load: {
      ServiceResult r = ms_->access(cluster_, op.addr, false, time_);
      TimeFs resume = cycle_at_or_after(r.ready, period_) * period_;
      int64_t busy = (resume - time_) / period_;
      stats_.cycles += busy;
      stats_.stall_cycles += busy - 1;
      stats_.retired += 1;
      stats_.counts.add(r.source);
      time_ = resume;
      break;
    }
    case InstrKind::Store: {
      ServiceResult r = ms_->access(cluster_, op.addr, true, time_);
      TimeFs resume = cycle_at_or_after(r.ready, period_) * period_;
      int64_t busy = (resume - time_) / period_;
      stats_.cycles += busy;
      stats_.stall_cycles += busy - 1;
      stats_.retired += 1;
      stats_.counts.add(r.source);
      time_ = resume;
      break;
    }
  }
  idx_++;
}

OutOfOrderRunner::OutOfOrderRunner(const MachineConfig& cfg, ClusterId cluster, MemorySystem* ms)
    : CoreRunner(cfg, cluster, ms),
      width_(cfg.cluster(cluster).core.issue_width),
      mlp_(cfg.cluster(cluster).core.mlp_degree),
      window_(cfg.cluster(cluster).core.window) {}

void OutOfOrderRunner::begin_slice(const SliceOps* ops, TimeFs start) {
  ops_ = ops;
  rob_.clear();
  uops_done_.assign(ops->ops.size(), 0);
  result_time_.assign(ops->ops.size(), MemorySystem::kNever);
  pending_deps_.resize(ops->ops.size());
  op_wake_.resize(ops->ops.size());
  data_ready_.assign(ops->ops.size(), 0);
  for (size_t k = 0; k < ops->ops.size(); ++k) {
    pending_deps_[k] = ops->ops[k].dep_count;
    op_wake_[k] = ops->ops[k].dep_count == 0 ? 0 : MemorySystem::kNever;
  }
  load_completions_.clear();
  dispatch_op_ = 0;
  dispatch_uop_ = 0;
  time_ = start;
  end_ = start;
  stats_ = {};
  prefetches_issued_ = 0;
  done_ = ops->ops.empty();
  if (done_) end_ = start;
}

void OutOfOrderRunner::finalize_op(int32_t op) {
  const SliceOp& o = ops_->ops[static_cast<size_t>(op)];
  const TimeFs result = result_time_[static_cast<size_t>(op)];
  for (int32_t c = 0; c < o.consumer_count; ++c) {
    const size_t consumer =
        static_cast<size_t>(ops_->consumers[static_cast<size_t>(o.first_consumer + c)]);
    data_ready_[consumer] = std::max(data_ready_[consumer], result);
    if (--pending_deps_[consumer] == 0) op_wake_[consumer] = data_ready_[consumer];
  }
}

int32_t OutOfOrderRunner::outstanding_loads(TimeFs t) const {
  int32_t n = 0;
  for (TimeFs c : load_completions_) n += c > t ? 1 : 0;
  return n;
}

TimeFs OutOfOrderRunner::earliest_load_completion(TimeFs t) const {
  TimeFs e = MemorySystem::kNever;
  for (TimeFs c : load_completions_)
    if (c > t) e = std::min(e, c);
  return e;
}

void OutOfOrderRunner::advance() {
  const TimeFs t = time_;
  int32_t retired = 0, dispatched = 0, issued = 0;

  // Retire: in-order from the window head.
  while (!rob_.empty() && retired < width_) {
    const RobEntry& head = rob_.front();
    if (!head.issued || head.completion > t) break;
    rob_.pop_front();
    retired++;
  }

  // Dispatch: program order, up to width, while window space remains.
  while (dispatched < width_ && static_cast<int32_t>(rob_.size()) < window_ &&
         dispatch_op_ < static_cast<int64_t>(ops_->ops.size())) {
    rob_.push_back({static_cast<int32_t>(dispatch_op_), false, 0});
    dispatched++;
    const Instr& ins = *ops_->ops[static_cast<size_t>(dispatch_op_)].ins;
    int32_t uops = ins.is_memory() ? 1 : ins.cost_ops;
    if (++dispatch_uop_ >= uops) {
      dispatch_op_++;
      dispatch_uop_ = 0;
    }
  }

  // Issue: oldest-first among ready uops. op_wake_ holds the exact time all
  // producers' results are available, so a blocked entry costs two compares.
  for (RobEntry& e : rob_) {
    if (issued >= width_) break;
    if (e.issued) continue;
    if (op_wake_[static_cast<size_t>(e.op)] > t) continue;
    if (e.blocked_until > t) continue;
    const SliceOp& op = ops_->ops[static_cast<size_t>(e.op)];
    const Instr& ins = *op.ins;
    if (ins.kind == InstrKind::Load) {
      if (outstanding_loads(t) >= mlp_) {
        e.blocked_until = earliest_load_completion(t);
        continue;
      }
      ServiceResult r = ms_->access(cluster_, op.addr, false, t);
      e.completion = r.ready;
      load_completions_.push_back(r.ready);
      stats_.counts.add(r.source);
    } else if (ins.kind == InstrKind::Store) {
      ServiceResult r = ms_->access(cluster_, op.addr, true, t);
      e.completion = r.ready;
      stats_.counts.add(r.source);
    } else if (ins.kind == InstrKind::Prefetch) {
      PrefetchOutcome r = ms_->issue_prefetch(cluster_, op.addr, t);
      switch (r) {
        case PrefetchOutcome::Enqueued: stats_.prefetch.enqueued++; break;
        case PrefetchOutcome::Deduped: stats_.prefetch.deduped++; break;
        case PrefetchOutcome::Dropped: stats_.prefetch.dropped++; break;
      }
      prefetches_issued_++;
      e.completion = t + period_;
    } else {
      e.completion = t + period_;
    }
    e.issued = true;
    const size_t opi = static_cast<size_t>(e.op);
    uops_done_[opi]++;
    TimeFs& rt = result_time_[opi];
    if (rt == MemorySystem::kNever) rt = e.completion;
    else rt = std::max(rt, e.completion);
    const int32_t need = ins.is_memory() ? 1 : ins.cost_ops;
    if (uops_done_[opi] == need) finalize_op(e.op);
    stats_.retired += 1;
    issued++;
  }

  stats_.cycles += 1;
  if (issued == 0 && retired == 0 && dispatched == 0) stats_.stall_cycles += 1;

  // Lazily prune completed loads so the outstanding scan stays short.
  if (load_completions_.size() > 64) {
    load_completions_.erase(
        std::remove_if(load_completions_.begin(), load_completions_.end(),
                       [&](TimeFs c) { return c <= t; }),
        load_completions_.end());
  }

  if (rob_.empty() && dispatch_op_ >= static_cast<int64_t>(ops_->ops.size())) {
    done_ = true;
    end_ = t + period_;
    return;
  }

  if (issued == 0 && retired == 0 && dispatched == 0) {
    // Nothing can change until some in-flight uop completes: jump there.
    TimeFs next = MemorySystem::kNever;
    for (const RobEntry& e : rob_)
      if (e.issued && e.completion > t) next = std::min(next, e.completion);
    assert(next != MemorySystem::kNever && "scheduler wedged with no pending completions");
    int64_t target = cycle_at_or_after(next, period_);
    int64_t skipped = target - t / period_ - 1;
    stats_.cycles += skipped;
    stats_.stall_cycles += skipped;
    time_ = target * period_;
  } else {
    time_ = t + period_;
  }
}

SliceResult run_slice(const ValidatedKernel& phase, int64_t begin, int64_t end,
                      const MachineConfig& cfg, ClusterId cluster, MemorySystem* ms,
                      TimeFs start_time) {
  SliceOps ops;
  expand_slice(phase, begin, end, &ops);
  const CoreConfig& core = cfg.cluster(cluster).core;
  InOrderRunner in_order(cfg, cluster, ms);
  OutOfOrderRunner out_of_order(cfg, cluster, ms);
  CoreRunner& runner = core.kind == CoreKind::InOrder
                           ? static_cast<CoreRunner&>(in_order)
                           : static_cast<CoreRunner&>(out_of_order);
  TimeFs start = cycle_at_or_after(start_time, core.period_fs()) * core.period_fs();
  runner.begin_slice(&ops, start);
  while (!runner.done()) {
    TimeFs t = runner.next_time();
    TimeFs arr = ms->next_arrival();
    if (arr <= t) ms->apply_arrivals(t);
    runner.advance();
  }
  return {runner.stats(), start, runner.end_time()};
}

}  // namespace dae
