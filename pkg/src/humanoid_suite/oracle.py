"""Independent reference transcription of every task formula.

This module deliberately re-implements the reward and termination math in
plain scalar Python, without touching the kernel implementations in
``humanoid_suite.rewards``. It shares only the loaded task config (the
declared single source of truth for constants). The rollout CLI's
oracle-diff mode and the equivalence test suite compare the two paths.
"""

import math


def oracle_tolerance(x, lower, upper, margin, value_at_margin=0.1, sigmoid="gaussian"):
    if lower > upper:
        raise ValueError("invalid bounds")
    if margin < 0:
        raise ValueError("negative margin")
    if lower <= x <= upper:
        return 1.0
    if margin == 0:
        return 0.0
    distance = ((lower - x) if x < lower else (x - upper)) / margin
    if sigmoid == "gaussian":
        scale = math.sqrt(-2.0 * math.log(value_at_margin))
        z = distance * scale
        return math.exp(-0.5 * z * z)
    if sigmoid == "linear":
        scaled = distance * (1.0 - value_at_margin)
        return 1.0 - scaled if abs(scaled) < 1.0 else 0.0
    if sigmoid == "quadratic":
        scaled = distance * math.sqrt(1.0 - value_at_margin)
        return 1.0 - scaled * scaled if abs(scaled) < 1.0 else 0.0
    raise ValueError(f"unknown sigmoid {sigmoid!r}")


def _norm3(a, b):
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def _tolc(task, x, bounds, margin):
    tc = task.common["tolerance"]
    c = task.constants
    return oracle_tolerance(x, bounds[0], bounds[1], margin,
                            c.get("value_at_margin", tc["value_at_margin"]),
                            c.get("sigmoid", tc["sigmoid"]))


def _aux(task, state, action):
    """height / upright / stand / e / stable / still, straight from the defaults."""
    common = task.common
    z_head = state.body_pose["head"][2]
    height = _tolc(task, z_head, common["height"]["bounds"], common["height"]["margin"])
    upright = _tolc(task, state.z_proj, common["upright"]["bounds"], common["upright"]["margin"])
    stand = height * upright
    total = 0.0
    for ui in action:
        total += _tolc(task, float(ui), (0.0, 0.0), common["effort"]["margin"])
    e = 0.2 * (4.0 + total / len(action))
    stable = stand * e
    vx, vy = state.pelvis_frame_vel
    still_x = _tolc(task, vx, (0.0, 0.0), common["still"]["margin"])
    still_y = _tolc(task, vy, (0.0, 0.0), common["still"]["margin"])
    return {"height": height, "upright": upright, "stand": stand, "e": e,
            "stable": stable, "still_x": still_x, "still_y": still_y,
            "vx": vx, "vy": vy, "z_head": z_head}


def oracle_dense(task, state, action, episode=None):
    """Reference dense reward for one snapshot."""
    c = task.constants
    a = _aux(task, state, action)
    program = task.program

    if program == "walk" or program == "run":
        return a["stable"] * _tolc(task, a["vx"], c["move_bounds"], c["move_margin"])

    if program == "stand":
        return a["stable"] * ((a["still_x"] + a["still_y"]) / 2.0)

    if program == "sit":
        robot = state.body_pose["pelvis"]
        chair = state.body_pose[c["chair_body"]]
        sitting_x = _tolc(task, robot[0] - chair[0], c["sitting_x_bounds"], c["sitting_x_margin"])
        sitting_y = _tolc(task, robot[1] - chair[1], c["sitting_y_bounds"], c["sitting_y_margin"])
        sitting_z = _tolc(task, robot[2], c["sitting_z_bounds"], c["sitting_z_margin"])
        posture = _tolc(task, a["z_head"] - state.site_pos["imu"][2],
                        c["posture_bounds"], c["posture_margin"])
        seat = 0.5 * sitting_z + 0.5 * sitting_x * sitting_y
        return (seat * a["upright"] * posture) * a["e"] * ((a["still_x"] + a["still_y"]) / 2.0)

    if program == "balance":
        still = (a["still_x"] + a["still_y"]) / 2.0
        height_robot = _tolc(task, a["z_head"], c["height_bounds"], c["height_margin"])
        return (a["e"] * still) * (height_robot * a["upright"])

    if program == "stair":  # stair and slide share the program
        vfl = _tolc(task, a["z_head"] - state.body_pose["left_foot"][2],
                    c["foot_bounds"], c["foot_margin"])
        vfr = _tolc(task, a["z_head"] - state.body_pose["right_foot"][2],
                    c["foot_bounds"], c["foot_margin"])
        move = _tolc(task, a["vx"], c["move_bounds"], c["move_margin"])
        upright_band = _tolc(task, state.z_proj, c["upright_bounds"], c["upright_margin"])
        return a["e"] * move * upright_band * (vfl * vfr)

    if program == "pole":
        gamma = _gamma(task, state, c["obstacle_class"])
        move = _tolc(task, a["vx"], c["move_bounds"], c["move_margin"])
        return gamma * (c["stable_weight"] * a["stable"] + c["move_weight"] * move)

    if program == "reach":
        hand = state.site_pos[c["hand_site"]]
        goal = state.site_pos[c["target_site"]]
        d_hand = _norm3(hand, goal)
        v = state.body_linvel["pelvis"]
        penalty = v[0] ** 2 + v[1] ** 2 + v[2] ** 2
        health = c["health_scale"] * state.z_proj
        close = c["close_bonus"] if d_hand < c["close_threshold"] else 0.0
        success = c["success_bonus"] if d_hand < c["success_threshold"] else 0.0
        return -c["motion_penalty_scale"] * penalty + health + close + success

    if program == "hurdle":
        gamma = _gamma(task, state, c["obstacle_class"])
        move = _tolc(task, a["vx"], c["move_bounds"], c["move_margin"])
        return a["stable"] * move * gamma

    if program == "crawl":
        imu = state.site_pos["imu"]
        height_crawl = _tolc(task, a["z_head"], c["band_bounds"], c["band_margin"])
        height_imu = _tolc(task, imu[2], c["band_bounds"], c["band_margin"])
        q = state.body_pose["pelvis"][3:7]
        qc = c["quat_crawl"]
        err = math.sqrt(sum((q[i] - qc[i]) ** 2 for i in range(4)))
        orientation = _tolc(task, err, (0.0, 0.0), c["orientation_margin"])
        tunnel = _tolc(task, imu[1], c["tunnel_bounds"], c["tunnel_margin"])
        speed = _tolc(task, a["vx"], c["move_bounds"], c["move_margin"])
        return tunnel * (c["w_effort"] * a["e"]
                         + c["w_height"] * min(height_crawl, height_imu)
                         + c["w_orientation"] * orientation
                         + c["w_speed"] * speed)

    if program == "maze":
        idx = min(episode.checkpoint_index, len(task.stages["checkpoints"]) - 1)
        checkpoint = task.stages["checkpoints"][idx]
        vtx, vty = task.stages["v_targets"][idx]
        move = (_tolc(task, a["vx"] - vtx, (0.0, 0.0), abs(vtx))
                * _tolc(task, a["vy"] - vty, (0.0, 0.0), abs(vty)))
        proximity = _tolc(task, _norm3(checkpoint, state.body_pose["pelvis"]),
                          (0.0, 0.0), c["proximity_margin"])
        gamma = _gamma(task, state, c["obstacle_class"])
        return (c["w_stable"] * a["stable"] + c["w_move"] * move
                + c["w_proximity"] * proximity) * gamma

    if program == "push":
        d_goal = _norm3(state.body_pose[c["object"]], state.site_pos[c["destination_site"]])
        d_hand = _norm3(state.body_pose[c["object"]], state.site_pos[c["hand_site"]])
        success = 1.0 if d_goal < c["success_threshold"] else 0.0
        return c["alpha_success"] * success - c["alpha_target"] * d_goal - c["alpha_hand"] * d_hand

    if program == "cabinet":
        stage = min(episode.stage, 3)
        if stage == 0:
            q = state.joint_pos[task.scene_joint_qpos_index(c["slide_joint"])]
            r = abs(q / c["slide_range"])
        elif stage == 1:
            q = state.joint_pos[task.scene_joint_qpos_index(c["drawer_joint"])]
            r = abs(q / c["drawer_range"])
        else:
            cube = state.body_pose[c["cube_body"]]
            dx = _tolc(task, cube[0] - c["dest_x_center"], c["dest_x_bounds"], c["dest_xy_margin"])
            dy = _tolc(task, cube[1], c["dest_y_bounds"], c["dest_xy_margin"])
            zc = c["dest_z3_center"] if stage == 2 else c["dest_z4_center"]
            dz = _tolc(task, cube[2] - zc, c["dest_z_bounds"], c["dest_z_margin"])
            r_dest = c["w_xy"] * (dx + dy) / 2.0 + c["w_z"] * dz
            if stage == 2:
                left = state.joint_pos[task.scene_joint_qpos_index(c["hinge_left"])]
                right = state.joint_pos[task.scene_joint_qpos_index(c["hinge_right"])]
                opening = max(min(1.0, abs(left)), min(1.0, abs(right)))
            else:
                pull = state.joint_pos[task.scene_joint_qpos_index(c["pull_joint"])]
                opening = min(1.0, abs(pull))
            r = c["w_open"] * opening + c["w_dest"] * r_dest
        return c["w_stable"] * a["stable"] + c["w_task"] * r

    if program == "highbar":
        upright_hb = _tolc(task, state.z_proj, c["upright_bounds"], c["upright_margin"])
        z_feet = (state.body_pose["left_foot"][2] + state.body_pose["right_foot"][2]) / 2.0
        feet = _tolc(task, z_feet, c["feet_bounds"], c["feet_margin"])
        return upright_hb * feet * a["e"]

    if program == "door":
        q_door = state.joint_pos[task.scene_joint_qpos_index(c["hinge_joint"])]
        q_hatch = state.joint_pos[task.scene_joint_qpos_index(c["hatch_joint"])]
        open_door = min(1.0, q_door * q_door)
        open_hatch = _tolc(task, q_hatch, c["hatch_bounds"], c["hatch_margin"])
        door = state.body_pose[c["door_body"]]
        d = min(_norm3(state.site_pos["left_hand"], door),
                _norm3(state.site_pos["right_hand"], door))
        proximity = _tolc(task, d, c["proximity_bounds"], c["proximity_margin"])
        passage = _tolc(task, state.site_pos["imu"][0], c["passage_bounds"], c["passage_margin"])
        return (c["w_stable"] * a["stable"] + c["w_door"] * open_door
                + c["w_hatch"] * open_hatch + c["w_proximity"] * proximity
                + c["w_passage"] * passage)

    if program == "truck":
        pelvis = state.body_pose["pelvis"]
        table = state.body_pose[c["table_body"]]
        on_truck, picked, on_table = [], [], []
        for name, cat in zip(c["packages"], episode.package_categories):
            (on_truck if cat == "truck" else picked if cat == "picked" else on_table).append(name)

        def term(names, anchor):
            if not names:
                return 0.0
            best = min(_norm3(state.body_pose[n], anchor) for n in names)
            return _tolc(task, best, c["category_bounds"], c["category_margin"])

        truck_t = term(on_truck, pelvis)
        picked_t = term(picked, pelvis)
        table_t = term(on_table, table)
        r_location = c["location_scale"] * (len(on_table) + len(picked) - len(on_truck))
        return r_location + a["upright"] * (1.0 + truck_t + picked_t + table_t)

    if program == "cube":
        target = state.body_pose[c["target_body"]][3:7]
        acc = 0.0
        for cube in (c["left_cube"], c["right_cube"]):
            q = state.body_pose[cube][3:7]
            acc += sum((q[i] - target[i]) ** 2 for i in range(4)) / 4.0
        orientation = acc / 2.0
        if c.get("orientation_as_tolerance"):
            orientation = _tolc(task, orientation, (0.0, 0.0), 1.0)
        prox = 0.0
        for cube, hand in ((c["left_cube"], "left_hand"), (c["right_cube"], "right_hand")):
            prox += _tolc(task, _norm3(state.body_pose[cube], state.site_pos[hand]),
                          (0.0, 0.0), c["proximity_margin"])
        still = (a["still_x"] + a["still_y"]) / 2.0
        return (c["w_posture"] * (a["stable"] * still)
                + c["w_orientation"] * orientation + c["w_proximity"] * prox / 2.0)

    if program == "bookshelf":
        idx = min(episode.stage, len(task.stages["objects"]) - 1)
        pair = episode.subtask_order[idx]
        obj = state.body_pose[task.stages["objects"][pair]]
        dest = state.site_pos[task.stages["destinations"][pair]]
        prox_dest = _tolc(task, _norm3(obj, dest), c["dest_bounds"], c["dest_margin"])
        d_hand = min(_norm3(obj, state.site_pos["left_hand"]),
                     _norm3(obj, state.site_pos["right_hand"]))
        prox_hand = math.exp(-d_hand)
        return c["w_hand"] * prox_hand + c["w_stable"] * a["stable"] + c["w_dest"] * prox_dest

    if program == "basketball":
        ball = state.body_pose[c["ball"]]
        dmax = max(_norm3(ball, state.site_pos["left_hand"]),
                   _norm3(ball, state.site_pos["right_hand"]))
        prox = _tolc(task, dmax, c["prox_bounds"], c["prox_margin"])
        if episode.stage == 0:
            return c["catch_w_prox"] * prox + c["catch_w_stable"] * a["stable"]
        aim = _tolc(task, _norm3(ball, state.site_pos[c["basket_site"]]),
                    (0.0, 0.0), c["aim_margin"])
        return c["throw_w_prox"] * prox + c["throw_w_stable"] * a["stable"] + c["throw_w_aim"] * aim

    if program == "window":
        tool = state.body_pose[c["tool_body"]]
        prox = (_tolc(task, _norm3(tool, state.site_pos["left_hand"]), (0.0, 0.0), c["proximity_margin"])
                + _tolc(task, _norm3(tool, state.site_pos["right_hand"]), (0.0, 0.0), c["proximity_margin"])) / 2.0
        d_window = _tolc(task, _norm3(state.body_pose["head"], state.body_pose[c["window_body"]]),
                         c["window_bounds"], c["window_margin"])
        move_wipe = _tolc(task, abs(state.body_linvel[c["tool_body"]][2]),
                          c["wipe_bounds"], c["wipe_margin"])
        r_manip = (c["w_move"] * move_wipe + c["w_prox"] * prox
                   + c["w_window"] * (a["stable"] * d_window))
        r_contact = 0.0
        for s in c["wipe_sites"]:
            r_contact += _tolc(task, state.site_pos[s][0], c["contact_bounds"], c["contact_margin"])
        r_contact /= len(c["wipe_sites"])
        return c["w_manipulation"] * r_manip + c["w_contact"] * r_contact

    if program == "spoon":
        spoon = state.body_pose[c["tool_body"]]
        prox = (_tolc(task, _norm3(spoon, state.site_pos["left_hand"]), (0.0, 0.0), c["proximity_margin"])
                + _tolc(task, _norm3(spoon, state.site_pos["right_hand"]), (0.0, 0.0), c["proximity_margin"])) / 2.0
        pot = state.body_pose[c["pot_body"]]
        phase = c["phase_step"] * state.step_index
        dest = (pot[0] + c["circle_radius"] * math.cos(phase),
                pot[1] + c["circle_radius"] * math.sin(phase),
                pot[2])
        trajectory = _tolc(task, _norm3(spoon, dest), (0.0, 0.0), c["trajectory_margin"])
        inside = 0
        for axis in range(3):
            if abs(spoon[axis] - pot[axis]) <= c["pot_half_extents"][axis]:
                inside += 1
        dest_term = inside / 3.0
        return (c["w_stable"] * a["stable"] + c["w_prox"] * prox
                + c["w_dest"] * dest_term + c["w_traj"] * trajectory)

    if program == "kitchen":
        return 0.0

    if program == "package":
        pkg = state.body_pose[c["object"]]
        d_goal = _norm3(pkg, state.site_pos[c["destination_site"]])
        d_hand = (_norm3(pkg, state.site_pos["left_hand"])
                  + _norm3(pkg, state.site_pos["right_hand"]))
        height_pkg = min(c["height_cap"], pkg[2])
        success = 1.0 if d_goal < c["success_threshold"] else 0.0
        return (-c["dist_scale"] * d_goal - c["hand_scale"] * d_hand + a["stable"]
                + height_pkg + c["success_bonus"] * success)

    if program == "powerlift":
        height_bar = _tolc(task, state.body_pose[c["barbell_body"]][2],
                           c["barbell_bounds"], c["barbell_margin"])
        return c["w_stable"] * a["stable"] + c["w_height"] * height_bar

    if program == "room":
        xs = [state.body_pose[o][0] for o in c["objects"]]
        ys = [state.body_pose[o][1] for o in c["objects"]]
        if len(xs) < 2:
            spread = 0.0
        else:
            mx = sum(xs) / len(xs)
            my = sum(ys) / len(ys)
            var_x = sum((v - mx) ** 2 for v in xs) / len(xs)
            var_y = sum((v - my) ** 2 for v in ys) / len(ys)
            spread = max(var_x, var_y)
        cleanness = _tolc(task, spread, (0.0, 0.0), c["clean_margin"])
        return c["w_stable"] * a["stable"] + c["w_clean"] * cleanness

    if program == "insert":
        peg_a = state.body_pose[c["peg_a"]]
        peg_b = state.body_pose[c["peg_b"]]
        prox_block = (_tolc(task, _norm3(peg_a, state.site_pos[c["end_a"]]), (0.0, 0.0), c["proximity_margin"])
                      + _tolc(task, _norm3(peg_b, state.site_pos[c["end_b"]]), (0.0, 0.0), c["proximity_margin"])) / 2.0
        height_pegs = (_tolc(task, peg_a[2] - c["height_offset"], (0.0, 0.0), c["height_margin"])
                       + _tolc(task, peg_b[2] - c["height_offset"], (0.0, 0.0), c["height_margin"])) / 2.0
        prox_hands = (_tolc(task, _norm3(peg_a, state.site_pos["left_hand"]), (0.0, 0.0), c["proximity_margin"])
                      + _tolc(task, _norm3(peg_b, state.site_pos["right_hand"]), (0.0, 0.0), c["proximity_margin"])) / 2.0
        return ((c["w_stable"] * a["stable"] + c["w_block"] * prox_block)
                * (c["w_height"] * height_pegs + c["w_hands"] * prox_hands))

    raise ValueError(f"oracle has no program {program!r}")


def _gamma(task, state, class_name):
    obstacles = task.scene.obstacle_classes[class_name]
    robot = task.robot.geoms
    for contact in state.contacts:
        names = (contact.geom_a, contact.geom_b)
        if ((names[0] in robot and names[1] in obstacles)
                or (names[1] in robot and names[0] in obstacles)):
            return task.constants["collision_penalty"]
    return 1.0


def oracle_terminated(task, state, episode=None):
    """Reference transcription of the per-task termination rules.

    Returns (terminated, reason) with the same reason vocabulary as the
    episode machine.
    """
    term = task.termination
    success = term.get("success")
    if success is not None:
        if success["kind"] == "distance_below":
            a = _resolve(state, success["a"])
            b = _resolve(state, success["b"])
            if _norm3(a, b) < success["threshold"]:
                return True, "success"
        elif success["kind"] == "all_subtasks":
            if episode is not None and episode.all_subtasks_done:
                return True, "success"
        elif success["kind"] == "all_delivered":
            if episode is not None and all(c == "table" for c in episode.package_categories):
                return True, "success"
    for drop in term.get("drops", ()):
        if state.body_pose[drop["body"]][2] < drop["below"]:
            return True, "object_dropped"
    if term.get("pelvis_below") is not None:
        if state.body_pose["pelvis"][2] < term["pelvis_below"]:
            return True, "failure_height"
    if term.get("zproj_below") is not None:
        if state.z_proj < term["zproj_below"]:
            return True, "failure_height"
    if term.get("head_below") is not None:
        if state.body_pose["head"][2] < term["head_below"]:
            return True, "failure_height"
    for rule in term.get("collision_rules", ()):
        if rule["kind"] == "only_allowed":
            for contact in state.contacts:
                pair = (contact.geom_a, contact.geom_b)
                if rule["geom"] in pair:
                    other = pair[0] if pair[1] == rule["geom"] else pair[1]
                    if other not in rule["allowed"]:
                        return True, "failure_collision"
        elif rule["kind"] == "forbidden_pair":
            want = set(rule["geoms"])
            for contact in state.contacts:
                if {contact.geom_a, contact.geom_b} == want:
                    return True, "failure_collision"
    if state.step_index >= task.episode_cap:
        return True, "timeout"
    return False, None


def _resolve(state, ref):
    kind, name = ref.split(":", 1)
    return state.body_pose[name] if kind == "body" else state.site_pos[name]
