"""Small programs used by the oracle comparisons and the semantics tests.

Every program here stays within three processors and thirty reachable
states, so the brute-force enumerator finishes quickly."""

ASSIGN_ONLY = """
class APPLICATION root
create make
feature
  make
    local
      x: INTEGER
    do
      x := 1
    end
end
"""

TWO_WORKERS = """
class APPLICATION root
create make
feature
  a, b: separate WORKER

  make
    do
      create a
      create b
      poke (a, b)
    end

  poke (x, y: separate WORKER)
    do
      x.bump
      y.bump
    end
end

class WORKER
feature
  n: INTEGER

  bump
    do
      n := n + 1
    end
end
"""

QUERY = """
class APPLICATION root
create make
feature
  c: separate COUNTER
  seen: INTEGER

  make
    do
      create c.make
      read_it (c)
    end

  read_it (x: separate COUNTER)
    do
      x.bump
      seen := x.value
    end
end

class COUNTER
create make
feature
  value: INTEGER

  make
    do
      value := 10
    end

  bump
    do
      value := value + 1
    end
end
"""

WAIT_CONDITION = """
class APPLICATION root
create make
feature
  flag: separate FLAG
  w: separate WAITER

  make
    do
      create flag
      create w
      start (w, flag)
      raise (flag)
    end

  start (x: separate WAITER; f: separate FLAG)
    do
      x.await (f)
    end

  raise (f: separate FLAG)
    do
      f.set
    end
end

class FLAG
feature
  up: BOOLEAN

  set
    do
      up := True
    end
end

class WAITER
feature
  done: BOOLEAN

  await (g: separate FLAG)
    require
      g.up
    do
      done := True
    end
end
"""

CROSSED_LOCKS = """
class APPLICATION root
create make
feature
  make
    local
      a, b: separate RES
    do
      create a
      create b
      left (a, b)
    end

  left (x, y: separate RES)
    do
      x.grab (y)
    end
end

class RES
feature
  grab (other: separate RES)
    do
      touch (other)
    end

  touch (o: separate RES)
    do
    end
end
"""

LOCAL_OBJECTS = """
class APPLICATION root
create make
feature
  make
    local
      i: INTEGER
      box: BOX
    do
      from i := 0 until i >= 2 loop
        create box.make (i)
        i := i + 1
      end
    end
end

class BOX
create make
feature
  v: INTEGER

  make (n: INTEGER)
    do
      v := n * 2
    end
end
"""

VOID_CALL = """
class APPLICATION root
create make
feature
  w: separate WORKER

  make
    do
      go (w)
    end

  go (x: separate WORKER)
    do
      x.work
    end
end

class WORKER
feature
  work
    do
    end
end
"""

FALSE_ENSURE = """
class APPLICATION root
create make
feature
  n: INTEGER

  make
    do
      set
    end

  set
    do
      n := 1
    ensure
      n = 2
    end
end
"""

DIVIDE_BY_ZERO = """
class APPLICATION root
create make
feature
  make
    local
      x, y: INTEGER
    do
      x := 1 // y
    end
end
"""

# name -> (source, expected verdict under the default checks)
PROGRAMS = {
    "assign_only": ASSIGN_ONLY,
    "two_workers": TWO_WORKERS,
    "query": QUERY,
    "wait_condition": WAIT_CONDITION,
    "crossed_locks": CROSSED_LOCKS,
    "local_objects": LOCAL_OBJECTS,
    "void_call": VOID_CALL,
    "false_ensure": FALSE_ENSURE,
}
