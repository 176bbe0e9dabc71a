"""Meta-RL: learning to find goals in a circular arena.

The agent lives in a unit disc; each episode hides a goal disc somewhere in
the arena.  Reaching it gives reward 1 and teleports the agent to a random
position, so a good agent keeps returning to the goal it discovered.  Policy
and value function are read out of one recurrent spiking network trained with
clipped-surrogate policy gradients; gradients flow into the network through
BPTT with the spike pseudo-derivative.

This demo runs a short training burst on an easier arena (large fixed goal)
so the reward trend is visible in about a minute.

Run:  python3 demos/05_meta_rl_navigation.py
"""

import numpy as np

from lsnn.rl import ArenaConfig, PPOConfig, random_policy_baseline, train_meta_rl

arena = ArenaConfig(goal_radius=0.5, goal_center_radius=0.0, episode_steps=100)
ppo = PPOConfig(episodes_per_iter=5)

baseline = random_policy_baseline(arena, np.random.default_rng(99), n_episodes=100)
print(f"random policy: {baseline:.2f} goals/episode\n")

res = train_meta_rl(arena=arena, ppo=ppo, iterations=40, n_regular=40,
                    n_adaptive=20, connectivity=0.3, delay_range=(1, 3),
                    seed=0, log_every=5)

g = res["goals_per_episode"]
print(f"\ntrained (last 10 iters): {g[-10:].mean():.2f} goals/episode")
print("Rewards are fed back as input pulses, so within an episode the agent")
print("can exploit where the goal turned out to be -- that is the 'meta' part.")
